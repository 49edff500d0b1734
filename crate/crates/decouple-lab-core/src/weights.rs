//! Fractal measures and weight functions: iterated-subdivision (Cantor)
//! measures, Frostman-constant certification, measure mollification into
//! `[0,1]`-valued weights, and ball-condition profiles.

use crate::sums::sum_f64;
use crate::{bump, Error, Result};
use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::SeedableRng;

/// Weighted atoms with a claimed dimension certificate.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    pub dim: usize,
    /// flat coordinates, one `dim` chunk per atom
    pub atoms: Vec<f64>,
    pub masses: Vec<f64>,
    /// claimed Frostman dimension
    pub alpha: f64,
    /// certified Frostman constant over the tested dyadic scale range
    pub c_mu: f64,
}

impl DiscreteMeasure {
    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.atoms[i * self.dim..(i + 1) * self.dim]
    }

    pub fn total_mass(&self) -> f64 {
        sum_f64(self.masses.iter().copied())
    }

    /// Mass of the closed/open ball `|x - c| < t` (strict).
    pub fn ball_mass(&self, center: &[f64], t: f64) -> f64 {
        sum_f64((0..self.len()).filter_map(|i| {
            let d2 = sum_f64(
                self.atom(i)
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c)),
            );
            if d2.sqrt() < t {
                Some(self.masses[i])
            } else {
                None
            }
        }))
    }

    /// Smallest pairwise distance scale of the support (atom spacing).
    pub fn atom_spacing(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let d2 = sum_f64(
                    self.atom(i)
                        .iter()
                        .zip(self.atom(j))
                        .map(|(a, b)| (a - b) * (a - b)),
                );
                if d2 > 0.0 {
                    best = best.min(d2.sqrt());
                }
            }
        }
        best
    }

    pub fn support_diameter(&self) -> f64 {
        let mut best = 0.0_f64;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let d2 = sum_f64(
                    self.atom(i)
                        .iter()
                        .zip(self.atom(j))
                        .map(|(a, b)| (a - b) * (a - b)),
                );
                best = best.max(d2.sqrt());
            }
        }
        best
    }

    /// Affine image `x -> center + radius * x` of a measure on `[0,1]^d`,
    /// masses unchanged.
    pub fn mapped_into_ball(&self, center: &[f64], radius: f64) -> DiscreteMeasure {
        let d = self.dim;
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for i in 0..self.len() {
            for k in 0..d {
                atoms.push(center[k] + radius * (2.0 * self.atom(i)[k] - 1.0) / (d as f64).sqrt());
            }
        }
        DiscreteMeasure {
            dim: d,
            atoms,
            masses: self.masses.clone(),
            alpha: self.alpha,
            c_mu: self.c_mu,
        }
    }
}

/// Subdivision pattern for [`cantor_measure`]: which of the `base^d` cells
/// survive each refinement step.
#[derive(Clone, Debug)]
pub enum CantorPattern {
    /// keep the product of per-axis index sets (e.g. `{0,2}` of base 3)
    PerAxis { base: usize, keep: Vec<Vec<usize>> },
    /// keep an explicit set of multi-indices
    Explicit { base: usize, keep: Vec<Vec<usize>> },
    /// keep `count` cells chosen by a seeded shuffle of all `base^d` cells
    Seeded { base: usize, count: usize },
}

impl CantorPattern {
    fn base(&self) -> usize {
        match self {
            CantorPattern::PerAxis { base, .. }
            | CantorPattern::Explicit { base, .. }
            | CantorPattern::Seeded { base, .. } => *base,
        }
    }

    fn keep_count(&self, d: usize) -> usize {
        match self {
            CantorPattern::PerAxis { keep, .. } => keep.iter().map(|k| k.len()).product(),
            CantorPattern::Explicit { keep, .. } => keep.len(),
            CantorPattern::Seeded { count, .. } => {
                let _ = d;
                *count
            }
        }
    }

    /// The kept multi-indices, resolved deterministically from the seed.
    fn cells(&self, d: usize, seed: u64) -> Vec<Vec<usize>> {
        match self {
            CantorPattern::PerAxis { keep, .. } => {
                let mut out: Vec<Vec<usize>> = vec![Vec::new()];
                for axis in 0..d {
                    let opts = &keep[axis.min(keep.len() - 1)];
                    let mut next = Vec::with_capacity(out.len() * opts.len());
                    for prefix in &out {
                        for &o in opts {
                            let mut v = prefix.clone();
                            v.push(o);
                            next.push(v);
                        }
                    }
                    out = next;
                }
                out
            }
            CantorPattern::Explicit { keep, .. } => keep.clone(),
            CantorPattern::Seeded { base, count } => {
                let total = base.pow(d as u32);
                let mut all: Vec<usize> = (0..total).collect();
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                all.shuffle(&mut rng);
                all.truncate(*count);
                all.sort_unstable();
                all.iter()
                    .map(|&flat| {
                        let mut v = Vec::with_capacity(d);
                        let mut f = flat;
                        for _ in 0..d {
                            v.push(f % base);
                            f /= base;
                        }
                        v
                    })
                    .collect()
            }
        }
    }
}

/// Iterated-subdivision measure: starting from `[0,1]^d`, repeatedly keeps
/// the pattern's cells with equal mass split, `depth` times; atoms are the
/// final cell midpoints. The realized dimension `log k / log b` must match
/// `alpha_target` within 0.1.
pub fn cantor_measure(
    d: usize,
    alpha_target: f64,
    depth: usize,
    pattern: &CantorPattern,
    seed: u64,
) -> Result<DiscreteMeasure> {
    if d == 0 || alpha_target <= 0.0 || alpha_target > d as f64 {
        return Err(Error::InvalidDimension(alloc::format!(
            "alpha_target {alpha_target} outside (0, {d}]"
        )));
    }
    if depth > 10 {
        return Err(Error::InvalidScale("depth > 10".to_string()));
    }
    let b = pattern.base();
    if b < 2 {
        return Err(Error::InvalidScale("subdivision base must be >= 2".to_string()));
    }
    let k = pattern.keep_count(d);
    if k == 0 || k > b.pow(d as u32) {
        return Err(Error::InvalidDimension(alloc::format!(
            "keep count {k} outside [1, base^d]"
        )));
    }
    let realized = (k as f64).ln() / (b as f64).ln();
    if (realized - alpha_target).abs() > 0.1 {
        return Err(Error::UnachievableDimension(alloc::format!(
            "pattern gives dimension {realized:.4}, target {alpha_target:.4}"
        )));
    }
    let cells = pattern.cells(d, seed);
    // corners of kept cells accumulate over the levels
    let mut corners: Vec<Vec<f64>> = vec![vec![0.0; d]];
    let mut w = 1.0;
    for _ in 0..depth {
        w /= b as f64;
        let mut next = Vec::with_capacity(corners.len() * cells.len());
        for c in &corners {
            for cell in &cells {
                let mut v = c.clone();
                for i in 0..d {
                    v[i] += cell[i] as f64 * w;
                }
                next.push(v);
            }
        }
        corners = next;
    }
    let mass = (1.0 / k as f64).powi(depth as i32);
    let mut atoms = Vec::with_capacity(corners.len() * d);
    for c in &corners {
        for i in 0..d {
            atoms.push(c[i] + w / 2.0);
        }
    }
    let mut mu = DiscreteMeasure {
        dim: d,
        atoms,
        masses: vec![mass; corners.len()],
        alpha: realized,
        c_mu: 1.0,
    };
    // certify the Frostman constant over dyadic scales down to the spacing
    let spacing = if mu.len() > 1 { mu.atom_spacing() } else { 1.0 };
    let mut scales = Vec::new();
    let mut s = mu.support_diameter().max(spacing);
    while s >= spacing * 0.999 {
        scales.push(s);
        s /= 2.0;
    }
    if !scales.is_empty() {
        mu.c_mu = frostman_constant(&mu, realized, &scales)?;
    }
    Ok(mu)
}

/// Largest ratio `mu(B(x,t)) / t^alpha` over atom centers and the supplied
/// scales. Balls are open; scales below the atom spacing are meaningless
/// for discrete measures and should not be supplied.
pub fn frostman_constant(mu: &DiscreteMeasure, alpha: f64, scales: &[f64]) -> Result<f64> {
    if scales.is_empty() {
        return Err(Error::EmptyInput("no scales given".to_string()));
    }
    if scales.iter().any(|&s| s <= 0.0) {
        return Err(Error::Domain("scales must be positive".to_string()));
    }
    let mut worst = 0.0_f64;
    for &t in scales {
        // bucket atoms on a grid of side t to find ball masses in
        // neighboring buckets only
        let mut grid: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for i in 0..mu.len() {
            let key: Vec<i64> = mu.atom(i).iter().map(|&x| (x / t).floor() as i64).collect();
            grid.entry(key).or_default().push(i);
        }
        for i in 0..mu.len() {
            let x = mu.atom(i);
            let key: Vec<i64> = x.iter().map(|&v| (v / t).floor() as i64).collect();
            let mut mass = 0.0;
            let mut neigh = vec![-1i64; mu.dim];
            'n: loop {
                let k: Vec<i64> = key.iter().zip(&neigh).map(|(a, b)| a + b).collect();
                if let Some(ids) = grid.get(&k) {
                    for &j in ids {
                        let d2 = sum_f64(
                            mu.atom(j)
                                .iter()
                                .zip(x)
                                .map(|(a, b)| (a - b) * (a - b)),
                        );
                        if d2.sqrt() < t {
                            mass += mu.masses[j];
                        }
                    }
                }
                let mut ax = 0;
                loop {
                    if ax == mu.dim {
                        break 'n;
                    }
                    neigh[ax] += 1;
                    if neigh[ax] <= 1 {
                        break;
                    }
                    neigh[ax] = -1;
                    ax += 1;
                }
            }
            worst = worst.max(mass / t.powf(alpha));
        }
    }
    Ok(worst)
}

/// A `[0,1]`-valued weight sampled on a cell grid.
#[derive(Clone, Debug)]
pub struct Weight {
    pub dim: usize,
    /// cell side of the sample grid
    pub cell_size: f64,
    /// occupied cells: grid index -> value in [0,1]
    pub cells: BTreeMap<Vec<i64>, f64>,
    /// volume represented by each support point
    pub cell_volume: f64,
    /// normalization constant chosen by `weight_from_measure`, if any
    pub c1: Option<f64>,
}

impl Weight {
    /// Value at a point (0 outside the support cells).
    pub fn eval(&self, x: &[f64]) -> f64 {
        let key: Vec<i64> = x
            .iter()
            .map(|&v| (v / self.cell_size).floor() as i64)
            .collect();
        self.cells.get(&key).copied().unwrap_or(0.0)
    }

    pub fn support_points(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        self.cells.iter().map(move |(k, &v)| {
            let p: Vec<f64> = k.iter().map(|&i| (i as f64 + 0.5) * self.cell_size).collect();
            (p, v)
        })
    }

    pub fn total_integral(&self) -> f64 {
        sum_f64(self.cells.values().map(|&v| v * self.cell_volume))
    }

    pub fn max_value(&self) -> f64 {
        self.cells.values().fold(0.0_f64, |a, &b| a.max(b))
    }

    /// Indicator weight: value 1 on the cells containing the given points.
    pub fn indicator(dim: usize, cell_size: f64, points: &[f64]) -> Weight {
        let mut cells = BTreeMap::new();
        let n = points.len() / dim;
        for i in 0..n {
            let key: Vec<i64> = points[i * dim..(i + 1) * dim]
                .iter()
                .map(|&v| (v / cell_size).floor() as i64)
                .collect();
            cells.insert(key, 1.0);
        }
        Weight {
            dim,
            cell_size,
            cells,
            cell_volume: cell_size.powi(dim as i32),
            c1: None,
        }
    }
}

/// Mollifies `mu` at scale `1/R` with the tensor bump, rescales to
/// `B(0,R)`, and normalizes with the largest constant keeping the weight
/// at most 1:  `H(y) = c1 R^{alpha-d} (mu * eta_{1/R})(y/R)`.
///
/// The per-atom mollifier is normalized discretely on the sample grid, so
/// the total integral of the output is exactly
/// `c1 R^{alpha-d} R^d mass(mu)` up to roundoff.
pub fn weight_from_measure(mu: &DiscreteMeasure, big_r: f64, alpha: f64) -> Result<Weight> {
    if big_r < 4.0 {
        return Err(Error::InvalidScale(alloc::format!(
            "mollification scale R = {big_r} must be >= 4"
        )));
    }
    let d = mu.dim;
    // grid of side 1/2 over B(0, R) in the rescaled variable y
    let cell = 0.5;
    let cell_vol = cell.powi(d as i32);
    let mut density: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    for i in 0..mu.len() {
        let a = mu.atom(i);
        // atom position in y-coordinates
        let ya: Vec<f64> = a.iter().map(|&v| v * big_r).collect();
        // bump support radius 1 in y-coordinates; collect grid cells within
        let lo: Vec<i64> = ya.iter().map(|&v| ((v - 1.0) / cell).floor() as i64).collect();
        let hi: Vec<i64> = ya.iter().map(|&v| ((v + 1.0) / cell).ceil() as i64).collect();
        let mut touched: Vec<(Vec<i64>, f64)> = Vec::new();
        let mut idx = lo.clone();
        'cells: loop {
            let center: Vec<f64> = idx.iter().map(|&k| (k as f64 + 0.5) * cell).collect();
            let inside = sum_f64(center.iter().map(|&v| v * v)).sqrt() <= big_r;
            if inside {
                let mut v = 1.0;
                for k in 0..d {
                    v *= bump(center[k] - ya[k]);
                    if v == 0.0 {
                        break;
                    }
                }
                if v > 0.0 {
                    touched.push((idx.clone(), v));
                }
            }
            let mut ax = 0;
            loop {
                if ax == d {
                    break 'cells;
                }
                idx[ax] += 1;
                if idx[ax] <= hi[ax] {
                    break;
                }
                idx[ax] = lo[ax];
                ax += 1;
            }
        }
        let total: f64 = sum_f64(touched.iter().map(|(_, v)| *v)) * cell_vol;
        if total <= 0.0 {
            continue;
        }
        // kernel normalized to unit integral in the unrescaled variable:
        // in y-coordinates each atom contributes mass * R^d
        let jac = big_r.powi(d as i32);
        for (key, v) in touched {
            *density.entry(key).or_insert(0.0) += mu.masses[i] * jac * v / total;
        }
    }
    let scale_factor = big_r.powf(alpha - d as f64);
    let mut max_raw = 0.0_f64;
    for v in density.values() {
        max_raw = max_raw.max(v * scale_factor);
    }
    let c1 = if max_raw > 0.0 { 1.0 / max_raw } else { 1.0 };
    let cells: BTreeMap<Vec<i64>, f64> = density
        .into_iter()
        .map(|(k, v)| (k, (v * scale_factor * c1).min(1.0)))
        .collect();
    Ok(Weight {
        dim: d,
        cell_size: cell,
        cells,
        cell_volume: cell_vol,
        c1: Some(c1),
    })
}

/// For each scale `s`, the largest `integral_Q H / s^alpha` over s-cubes of
/// the origin-anchored lattice and its half-cell shift. Cube sums aggregate
/// whole cells by cell-center membership.
pub fn ball_condition_profile(h: &Weight, alpha: f64, scales: &[f64]) -> Result<Vec<(f64, f64)>> {
    if scales.iter().any(|&s| s <= 0.0) {
        return Err(Error::Domain("scales must be positive".to_string()));
    }
    let mut out = Vec::with_capacity(scales.len());
    for &s in scales {
        let mut worst = 0.0_f64;
        for shift in [0.0, 0.5] {
            let mut cubes: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
            for (p, v) in h.support_points() {
                let key: Vec<i64> = p.iter().map(|&x| ((x / s) + shift).floor() as i64).collect();
                *cubes.entry(key).or_insert(0.0) += v * h.cell_volume;
            }
            for &v in cubes.values() {
                worst = worst.max(v / s.powf(alpha));
            }
        }
        out.push((s, worst));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn middle_thirds(depth: usize) -> DiscreteMeasure {
        cantor_measure(
            1,
            (2.0_f64).ln() / (3.0_f64).ln(),
            depth,
            &CantorPattern::PerAxis {
                base: 3,
                keep: vec![vec![0, 2]],
            },
            0,
        )
        .unwrap()
    }

    #[test]
    fn middle_thirds_dimension_and_atoms() {
        let mu = middle_thirds(5);
        assert_eq!(mu.len(), 32);
        assert!((mu.alpha - 0.6309297535714574).abs() < 1e-12);
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn keep_all_cells_gives_full_dimension() {
        let mu = cantor_measure(
            2,
            2.0,
            2,
            &CantorPattern::PerAxis {
                base: 2,
                keep: vec![vec![0, 1], vec![0, 1]],
            },
            0,
        )
        .unwrap();
        assert_eq!(mu.len(), 16);
        assert!((mu.alpha - 2.0).abs() < 1e-12);
    }

    #[test]
    fn depth_zero_is_single_atom() {
        let mu = cantor_measure(
            1,
            0.6309,
            0,
            &CantorPattern::PerAxis {
                base: 3,
                keep: vec![vec![0, 2]],
            },
            0,
        )
        .unwrap();
        assert_eq!(mu.len(), 1);
        assert!((mu.masses[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unreachable_dimension_errors() {
        let r = cantor_measure(
            1,
            0.2,
            3,
            &CantorPattern::PerAxis {
                base: 3,
                keep: vec![vec![0, 2]],
            },
            0,
        );
        assert!(matches!(r, Err(Error::UnachievableDimension(_))));
    }

    #[test]
    fn subdivision_cell_masses_are_exact() {
        let mu = middle_thirds(6);
        // level-2 cell [0, 1/9): mass must be exactly 1/4 of the total
        let w: f64 = sum_f64(
            (0..mu.len())
                .filter(|&i| mu.atom(i)[0] < 1.0 / 9.0)
                .map(|i| mu.masses[i]),
        );
        assert!((w - 0.25).abs() < 1e-14);
        // a removed cell carries zero mass
        let removed: f64 = sum_f64(
            (0..mu.len())
                .filter(|&i| {
                    let x = mu.atom(i)[0];
                    (1.0 / 3.0..2.0 / 3.0).contains(&x)
                })
                .map(|i| mu.masses[i]),
        );
        assert_eq!(removed, 0.0);
    }

    #[test]
    fn frostman_uniform_square() {
        // uniform n x n grid on the unit square, alpha = 2
        let n = 32;
        let mut atoms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                atoms.push((i as f64 + 0.5) / n as f64);
                atoms.push((j as f64 + 0.5) / n as f64);
            }
        }
        let mu = DiscreteMeasure {
            dim: 2,
            atoms,
            masses: vec![1.0 / (n * n) as f64; n * n],
            alpha: 2.0,
            c_mu: 0.0,
        };
        let spacing = 1.0 / n as f64;
        let scales: Vec<f64> = (0..6).map(|k| spacing * (1 << k) as f64).collect();
        let c = frostman_constant(&mu, 2.0, &scales).unwrap();
        assert!(
            c <= core::f64::consts::PI + 0.1,
            "uniform square constant {c}"
        );
        assert!(c >= 0.5);
    }

    #[test]
    fn frostman_single_atom_blows_up_at_small_scales() {
        let mu = DiscreteMeasure {
            dim: 1,
            atoms: vec![0.3],
            masses: vec![1.0],
            alpha: 0.0,
            c_mu: 0.0,
        };
        let c = frostman_constant(&mu, 0.5, &[0.5, 0.125]).unwrap();
        // value is attained at the smallest scale: 1 / 0.125^0.5
        assert!((c - 1.0 / 0.125_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn frostman_middle_thirds_constant_moderate() {
        let mu = middle_thirds(6);
        let spacing = mu.atom_spacing();
        let mut scales = Vec::new();
        let mut s = 1.0;
        while s >= spacing {
            scales.push(s);
            s /= 2.0;
        }
        let c = frostman_constant(&mu, mu.alpha, &scales).unwrap();
        assert!((1.0..=4.0).contains(&c), "constant {c}");
    }

    #[test]
    fn frostman_empty_scales_errors() {
        let mu = middle_thirds(2);
        assert!(matches!(
            frostman_constant(&mu, 0.6, &[]),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn weight_from_measure_mass_conservation_and_max() {
        let mu = cantor_measure(
            2,
            2.0,
            2,
            &CantorPattern::PerAxis {
                base: 2,
                keep: vec![vec![0, 1], vec![0, 1]],
            },
            0,
        )
        .unwrap()
        .mapped_into_ball(&[0.0, 0.0], 0.8);
        let big_r = 16.0;
        let h = weight_from_measure(&mu, big_r, 2.0).unwrap();
        assert!((h.max_value() - 1.0).abs() < 1e-12);
        let c1 = h.c1.unwrap();
        let expect = c1 * big_r.powf(2.0 - 2.0) * big_r.powi(2) * mu.total_mass();
        let got = h.total_integral();
        assert!(
            (got - expect).abs() <= 1e-9 * expect.abs(),
            "integral {got} vs {expect}"
        );
    }

    #[test]
    fn weight_from_zero_measure_is_zero() {
        let mu = DiscreteMeasure {
            dim: 2,
            atoms: vec![0.0, 0.0],
            masses: vec![0.0],
            alpha: 2.0,
            c_mu: 0.0,
        };
        let h = weight_from_measure(&mu, 8.0, 2.0).unwrap();
        assert_eq!(h.total_integral(), 0.0);
    }

    #[test]
    fn ball_profile_constant_weight() {
        // H = 1 on [0, 8)^2 sampled on a half-cell grid
        let mut cells = BTreeMap::new();
        for i in 0..16 {
            for j in 0..16 {
                cells.insert(vec![i, j], 1.0);
            }
        }
        let h = Weight {
            dim: 2,
            cell_size: 0.5,
            cells,
            cell_volume: 0.25,
            c1: None,
        };
        let prof = ball_condition_profile(&h, 2.0, &[1.0, 2.0, 4.0]).unwrap();
        for (s, ratio) in prof {
            assert!(ratio <= 1.0 + 1e-12, "s = {s}: ratio {ratio}");
            assert!(ratio >= 0.9, "s = {s}: ratio {ratio}");
        }
    }

    #[test]
    fn ball_profile_single_cube_indicator() {
        // H = indicator of one s0-cube: ratio at s0 equals s0^{d-alpha}
        let s0 = 2.0;
        let mut cells = BTreeMap::new();
        for i in 0..4 {
            for j in 0..4 {
                cells.insert(vec![i, j], 1.0);
            }
        }
        let h = Weight {
            dim: 2,
            cell_size: 0.5,
            cells,
            cell_volume: 0.25,
            c1: None,
        };
        let alpha = 1.5;
        let prof = ball_condition_profile(&h, alpha, &[s0]).unwrap();
        let expect = s0.powf(2.0 - alpha);
        assert!((prof[0].1 - expect).abs() < 1e-12);
    }

    #[test]
    fn ball_profile_monotone_under_domination() {
        let mu = middle_thirds(4).mapped_into_ball(&[0.0], 0.9);
        let h2 = weight_from_measure(&mu, 8.0, 0.63).unwrap();
        let mut h1 = h2.clone();
        for v in h1.cells.values_mut() {
            *v *= 0.35;
        }
        let scales = [1.0, 2.0, 4.0];
        let p1 = ball_condition_profile(&h1, 0.63, &scales).unwrap();
        let p2 = ball_condition_profile(&h2, 0.63, &scales).unwrap();
        for (a, b) in p1.iter().zip(&p2) {
            assert!(a.1 <= b.1 + 1e-12);
        }
    }
}
