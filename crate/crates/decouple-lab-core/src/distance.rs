//! Machinery for pinned distance-set experiments: pushforward histograms,
//! concentrated plates, the per-tube heavy-plate scale `r(T)`, the good/bad
//! classification of unit-ball tubes, bad-mass measurement, Riesz energy
//! integrals, and the spherical-average L2 quantity of the good part.

use crate::extension::partition_weights;
use crate::geometry::{
    build_direction_net, build_plate_net, build_tube_family_for_directions, tube_in_plate, Plate,
    Tube, TubeFamily,
};
use crate::report::ExperimentReport;
use crate::sphere::sphere_points;
use crate::sums::{sum_f64, ComplexSum};
use crate::weights::DiscreteMeasure;
use crate::{Error, Result};
use alloc::string::ToString;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Histogram of pinned distances `|x - y|` weighted by atom masses.
#[derive(Clone, Debug)]
pub struct PushforwardDensity {
    /// increasing bin edges `0, w, 2w, ...`
    pub bin_edges: Vec<f64>,
    /// mass per bin; sums exactly to the measure's total mass
    pub masses: Vec<f64>,
    pub pin: Vec<f64>,
}

impl PushforwardDensity {
    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    pub fn total_mass(&self) -> f64 {
        sum_f64(self.masses.iter().copied())
    }

    /// `sum_bins density^2 * bin_width` with density = mass / width.
    pub fn density_l2_sq(&self) -> f64 {
        let w = self.bin_width();
        sum_f64(self.masses.iter().map(|m| (m / w) * (m / w) * w))
    }
}

/// Histogram of `|pin - atom|` with exact mass conservation.
pub fn pinned_pushforward(
    mu: &DiscreteMeasure,
    pin: &[f64],
    bin_width: f64,
) -> Result<PushforwardDensity> {
    if bin_width <= 0.0 {
        return Err(Error::Domain(alloc::format!(
            "bin width {bin_width} must be positive"
        )));
    }
    let mut bins: Vec<f64> = Vec::new();
    for i in 0..mu.len() {
        let d2 = sum_f64(
            mu.atom(i)
                .iter()
                .zip(pin)
                .map(|(a, p)| (a - p) * (a - p)),
        );
        let k = (d2.sqrt() / bin_width).floor() as usize;
        if k >= bins.len() {
            bins.resize(k + 1, 0.0);
        }
        bins[k] += mu.masses[i];
    }
    if bins.is_empty() {
        bins.push(0.0);
    }
    let edges = (0..=bins.len()).map(|k| k as f64 * bin_width).collect();
    Ok(PushforwardDensity {
        bin_edges: edges,
        masses: bins,
        pin: pin.to_vec(),
    })
}

/// Plates of the net carrying measure at least `gamma`.
pub fn concentrated_plates(
    mu: &DiscreteMeasure,
    net: &crate::geometry::PlateNet,
    gamma: f64,
) -> Result<Vec<Plate>> {
    if gamma < 0.0 {
        return Err(Error::Domain(alloc::format!(
            "concentration level {gamma} negative"
        )));
    }
    let mut out = Vec::new();
    for plate in net.plates() {
        if plate.mass(&mu.atoms, &mu.masses, mu.dim) >= gamma {
            out.push(plate);
        }
    }
    Ok(out)
}

/// Ascending dyadic scales `2^{-k}` in `[lo, 1]`.
pub fn dyadic_scales(lo: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut s = 1.0;
    while s >= lo * (1.0 - 1e-9) {
        out.push(s);
        s /= 2.0;
    }
    out.reverse();
    out
}

/// Smallest dyadic scale in `[c0 * delta, 1]` whose concentrated plates
/// contain the doubled tube; 1 when no scale qualifies. The `nets` map must
/// provide every dyadic scale of the range.
pub fn r_of_tube(tube: &Tube, nets: &[(f64, Vec<Plate>)], c0: f64, delta: f64) -> Result<f64> {
    let wanted = dyadic_scales(c0 * delta);
    if wanted.is_empty() {
        return Err(Error::InvalidScale(alloc::format!(
            "no dyadic scales in [{}, 1]",
            c0 * delta
        )));
    }
    for &r in &wanted {
        if !nets.iter().any(|(s, _)| (s - r).abs() <= 1e-12 * r) {
            return Err(Error::IncompleteInput(alloc::format!(
                "missing plate net at dyadic scale {r}"
            )));
        }
    }
    for &r in &wanted {
        let plates = &nets
            .iter()
            .find(|(s, _)| (s - r).abs() <= 1e-12 * r)
            .unwrap()
            .1;
        if plates.iter().any(|h| tube_in_plate(tube, h, 2.0)) {
            return Ok(r);
        }
    }
    Ok(1.0)
}

/// Parameters of the good/bad classification.
#[derive(Clone, Copy, Debug)]
pub struct DistsetParams {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub c0: f64,
    pub m: usize,
    /// base scale; the dyadic scale of level `j` is `r0 * 2^j`
    pub r0: f64,
}

impl DistsetParams {
    pub fn validate(&self, d: usize) -> Result<()> {
        if self.m < 1 || self.m > d {
            return Err(Error::InvalidDimension(alloc::format!(
                "m = {} outside [1, {d}]",
                self.m
            )));
        }
        let m = self.m as f64;
        if !(self.alpha > m - 1.0 && self.alpha <= m) {
            return Err(Error::InvalidDimension(alloc::format!(
                "alpha = {} outside (m-1, m] = ({}, {}]",
                self.alpha,
                m - 1.0,
                m
            )));
        }
        if !(self.beta < self.eta && self.eta < self.epsilon) {
            return Err(Error::Domain(alloc::format!(
                "parameter ordering beta < eta < epsilon violated: {} {} {}",
                self.beta,
                self.eta,
                self.epsilon
            )));
        }
        if self.beta < 0.0 || self.c0 < 1.0 || self.r0 < 4.0 {
            return Err(Error::Domain(
                "need beta >= 0, C0 >= 1, r0 >= 4".to_string(),
            ));
        }
        Ok(())
    }
}

/// The bad-tube mass threshold `delta^{alpha - 2 eps} / r^{alpha - (m-1)}`.
pub fn bad_threshold(delta: f64, r: f64, alpha: f64, m: usize, epsilon: f64) -> f64 {
    delta.powf(alpha - 2.0 * epsilon) / r.powf(alpha - (m as f64 - 1.0))
}

/// Good/bad classification of one dyadic level.
#[derive(Clone, Debug)]
pub struct GoodBadSplit {
    pub j: u32,
    /// `2 R_j^{-1/2 + beta}`
    pub delta: f64,
    pub big_r: f64,
    pub family: TubeFamily,
    /// indices into `family.tubes`
    pub good: Vec<usize>,
    pub bad: Vec<usize>,
    /// heavy-plate scale per tube
    pub r_of: Vec<f64>,
    /// recorded `mu_2(4T)` per tube
    pub mu2_4t: Vec<f64>,
    pub params: DistsetParams,
}

impl GoodBadSplit {
    pub fn good_tubes(&self) -> impl Iterator<Item = &Tube> {
        self.good.iter().map(|&i| &self.family.tubes[i])
    }

    pub fn bad_tubes(&self) -> impl Iterator<Item = &Tube> {
        self.bad.iter().map(|&i| &self.family.tubes[i])
    }

    pub fn bad_fraction(&self) -> f64 {
        if self.family.tubes.is_empty() {
            0.0
        } else {
            self.bad.len() as f64 / self.family.tubes.len() as f64
        }
    }
}

fn min_support_distance(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..mu1.len() {
        for j in 0..mu2.len() {
            let d2 = sum_f64(
                mu1.atom(i)
                    .iter()
                    .zip(mu2.atom(j))
                    .map(|(a, b)| (a - b) * (a - b)),
            );
            best = best.min(d2);
        }
    }
    best.sqrt()
}

fn max_support_norm(mu: &DiscreteMeasure) -> f64 {
    (0..mu.len())
        .map(|i| sum_f64(mu.atom(i).iter().map(|v| v * v)).sqrt())
        .fold(0.0, f64::max)
}

/// Classifies the level-`j` tubes: builds the unit-ball tube family over a
/// full direction net at resolution `R_j^{-1/2}`, computes `r(T)` against
/// the plates of the net that are `delta^eta`-concentrated on
/// `mu_1 + mu_2`, and marks tubes whose `mu_2(4T)` meets the threshold.
pub fn classify_tubes(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    j: u32,
    params: &DistsetParams,
) -> Result<GoodBadSplit> {
    let d = mu1.dim;
    if mu2.dim != d {
        return Err(Error::InvalidDimension(
            "measure dimensions differ".to_string(),
        ));
    }
    params.validate(d)?;
    if max_support_norm(mu1) > 1.0 || max_support_norm(mu2) > 1.0 {
        return Err(Error::Domain(
            "measures must be supported in the unit ball".to_string(),
        ));
    }
    let sep = min_support_distance(mu1, mu2);
    if sep < 2.0 / params.c0 {
        return Err(Error::Domain(alloc::format!(
            "supports separated by {sep}, need >= 2/C0 = {}",
            2.0 / params.c0
        )));
    }
    let big_r = params.r0 * 2.0_f64.powi(j as i32);
    let delta = 2.0 * big_r.powf(-0.5 + params.beta);
    if params.c0 * delta > 1.0 {
        return Err(Error::InvalidScale(alloc::format!(
            "C0 delta = {} exceeds 1; no heavy-plate scales available",
            params.c0 * delta
        )));
    }
    // combined measure for the concentration test
    let combined = DiscreteMeasure {
        dim: d,
        atoms: mu1.atoms.iter().chain(mu2.atoms.iter()).copied().collect(),
        masses: mu1
            .masses
            .iter()
            .chain(mu2.masses.iter())
            .copied()
            .collect(),
        alpha: params.alpha,
        c_mu: mu1.c_mu.max(mu2.c_mu),
    };
    let gamma_level = delta.powf(params.eta);
    let mut nets: Vec<(f64, Vec<Plate>)> = Vec::new();
    for r in dyadic_scales(params.c0 * delta) {
        let net = build_plate_net(r, params.m, d)?;
        nets.push((r, concentrated_plates(&combined, &net, gamma_level)?));
    }
    let directions = build_direction_net(d, big_r.powf(-0.5));
    let family = build_tube_family_for_directions(
        &directions,
        big_r.powf(-0.5 + params.beta),
        2.0,
        1.0,
        big_r,
        params.beta,
    )?;
    let mut good = Vec::new();
    let mut bad = Vec::new();
    let mut r_of = Vec::with_capacity(family.tubes.len());
    let mut mu2_4t = Vec::with_capacity(family.tubes.len());
    for (ti, tube) in family.tubes.iter().enumerate() {
        let r = r_of_tube(tube, &nets, params.c0, delta)?;
        r_of.push(r);
        let mass = sum_f64((0..mu2.len()).filter_map(|i| {
            if tube.contains(mu2.atom(i), 4.0) {
                Some(mu2.masses[i])
            } else {
                None
            }
        }));
        mu2_4t.push(mass);
        let threshold = bad_threshold(delta, r, params.alpha, params.m, params.epsilon);
        if mass >= threshold {
            bad.push(ti);
        } else {
            good.push(ti);
        }
    }
    Ok(GoodBadSplit {
        j,
        delta,
        big_r,
        family,
        good,
        bad,
        r_of,
        mu2_4t,
        params: *params,
    })
}

/// Mass of `mu_1` carried by the union of doubled bad tubes through `x`.
pub fn bad_mass(split: &GoodBadSplit, mu1: &DiscreteMeasure, x: &[f64]) -> f64 {
    let through: Vec<&Tube> = split
        .bad
        .iter()
        .map(|&i| &split.family.tubes[i])
        .filter(|t| t.contains(x, 2.0))
        .collect();
    if through.is_empty() {
        return 0.0;
    }
    sum_f64((0..mu1.len()).filter_map(|i| {
        let a = mu1.atom(i);
        if through.iter().any(|t| t.contains(a, 2.0)) {
            Some(mu1.masses[i])
        } else {
            None
        }
    }))
}

/// Largest constant of the per-scale incidence inequality
/// `M mu_2(Y) <= C |W_r| delta^{alpha-2eps} / r^{alpha-(m-1)}` over the
/// good subfamilies with a common heavy-plate scale, with cubes classified
/// into dyadic count classes. Only cubes carrying `mu_2` mass enter the
/// left-hand side, so counts are computed per occupied cube.
pub fn incidence_inequality_constant(split: &GoodBadSplit, mu2: &DiscreteMeasure) -> f64 {
    let side = split.big_r.powf(-0.5);
    let d = mu2.dim;
    // mu_2 mass per occupied cube
    let mut cube_mass: alloc::collections::BTreeMap<Vec<i64>, f64> =
        alloc::collections::BTreeMap::new();
    for i in 0..mu2.len() {
        let key: Vec<i64> = mu2
            .atom(i)
            .iter()
            .map(|&v| (v / side).floor() as i64)
            .collect();
        *cube_mass.entry(key).or_insert(0.0) += mu2.masses[i];
    }
    let cubes: Vec<(Vec<f64>, Vec<f64>, Vec<f64>, f64)> = cube_mass
        .iter()
        .map(|(k, &m)| {
            let lo: Vec<f64> = k.iter().map(|&v| v as f64 * side).collect();
            let hi: Vec<f64> = k.iter().map(|&v| (v + 1) as f64 * side).collect();
            let center: Vec<f64> = k.iter().map(|&v| (v as f64 + 0.5) * side).collect();
            (lo, hi, center, m)
        })
        .collect();
    let half_diag = side * (d as f64).sqrt() / 2.0;
    let mut worst = 0.0_f64;
    for &r in &dyadic_scales(split.params.c0 * split.delta) {
        let tubes: Vec<&Tube> = split
            .good
            .iter()
            .filter(|&&i| (split.r_of[i] - r).abs() <= 1e-12 * r)
            .map(|&i| &split.family.tubes[i])
            .collect();
        if tubes.is_empty() {
            continue;
        }
        let bound = tubes.len() as f64
            * bad_threshold(
                split.delta,
                r,
                split.params.alpha,
                split.params.m,
                split.params.epsilon,
            );
        // per occupied cube: number of tubes meeting it
        let mut class_mass: alloc::collections::BTreeMap<u32, f64> =
            alloc::collections::BTreeMap::new();
        for (lo, hi, center, mass) in &cubes {
            let mut count = 0u32;
            for t in &tubes {
                // center prefilter, then the exact segment-box distance
                let ax = t.axial_coord(center).abs();
                if ax > t.length / 2.0 + half_diag {
                    continue;
                }
                if t.radial_dist(center) > t.radius + half_diag {
                    continue;
                }
                let (e0, e1) = t.endpoints();
                if crate::decoupling::segment_box_distance(&e0, &e1, lo, hi) <= t.radius {
                    count += 1;
                }
            }
            if count > 0 {
                let class = count.ilog2();
                *class_mass.entry(class).or_insert(0.0) += mass;
            }
        }
        for (&class, &mass) in &class_mass {
            let m_class = (1u32 << class) as f64;
            worst = worst.max(m_class * mass / bound);
        }
    }
    worst
}

/// Riesz energy `sum_{i != j} m_i m_j |x_i - x_j|^{-beta}`.
pub fn energy_integral(mu: &DiscreteMeasure, beta_exp: f64) -> Result<f64> {
    if beta_exp <= 0.0 {
        return Err(Error::Domain(alloc::format!(
            "energy exponent {beta_exp} must be positive"
        )));
    }
    if mu.len() < 2 {
        return Err(Error::UndefinedEnergy);
    }
    let mut acc = crate::sums::NeumaierSum::new();
    for i in 0..mu.len() {
        let xi = mu.atom(i);
        for jj in (i + 1)..mu.len() {
            let d2 = sum_f64(xi.iter().zip(mu.atom(jj)).map(|(a, b)| (a - b) * (a - b)));
            acc.add(2.0 * mu.masses[i] * mu.masses[jj] * d2.sqrt().powf(-beta_exp));
        }
    }
    Ok(acc.value())
}

/// `hat mu(omega) = sum_a m_a e^{-i omega . a}`.
fn measure_fourier(mu: &DiscreteMeasure, omega: &[f64]) -> Complex64 {
    let mut acc = ComplexSum::new();
    for i in 0..mu.len() {
        let phase = -sum_f64(mu.atom(i).iter().zip(omega).map(|(a, w)| a * w));
        let (s, c) = phase.sin_cos();
        acc.add(Complex64::new(c, s) * mu.masses[i]);
    }
    acc.value()
}

/// The dimensional gain exponent of the good-part L2 estimate.
pub fn gamma_exponent(d: usize, alpha: f64) -> Result<f64> {
    if d < 3 {
        return Err(Error::OutOfRange(alloc::format!(
            "gamma exponent defined for d >= 3, got {d}"
        )));
    }
    Ok(if d >= 4 {
        d as f64 * alpha / (d as f64 + 1.0)
    } else {
        alpha - alpha * alpha / 6.0
    })
}

/// Pinned-distance dimensional threshold.
pub fn falconer_threshold(d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::OutOfRange(alloc::format!(
            "threshold defined for d >= 3, got {d}"
        )));
    }
    Ok(if d >= 4 {
        d as f64 / 2.0 + 0.25 - 1.0 / (8.0 * d as f64 + 4.0)
    } else {
        1.5 + 0.25 + (17.0 - 12.0 * 2.0_f64.sqrt()) / 4.0
    })
}

/// Smallest admissible sphere-node count at scale `R` in dimension `d`.
pub fn required_sphere_nodes(d: usize, big_r: f64) -> usize {
    (6.0 * big_r.powi(d as i32 - 1)).ceil() as usize
}

/// Spherical average of the plain measure (no good/bad filtering):
/// `int |mu_1 * hat sigma_R(x)|^2 dmu_2(x)` via equal-weight sphere
/// quadrature.
pub fn spherical_average_l2(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    big_r: f64,
    sphere_nodes: usize,
) -> Result<f64> {
    let d = mu1.dim;
    if sphere_nodes < required_sphere_nodes(d, big_r) {
        return Err(Error::Resolution(alloc::format!(
            "{sphere_nodes} sphere nodes < required {}",
            required_sphere_nodes(d, big_r)
        )));
    }
    let nodes = sphere_points(d, sphere_nodes);
    let n = nodes.len() as f64;
    let scaled: Vec<Vec<f64>> = nodes
        .iter()
        .map(|w| w.iter().map(|v| v * big_r).collect())
        .collect();
    let s: Vec<Complex64> = scaled.iter().map(|w| measure_fourier(mu1, w)).collect();
    let mut total = crate::sums::NeumaierSum::new();
    for b in 0..mu2.len() {
        let x = mu2.atom(b);
        let mut acc = ComplexSum::new();
        for (k, w) in scaled.iter().enumerate() {
            let phase = sum_f64(x.iter().zip(w).map(|(a, b)| a * b));
            let (si, co) = phase.sin_cos();
            acc.add(Complex64::new(co, si) * s[k]);
        }
        let g = acc.value() / n;
        total.add(mu2.masses[b] * g.norm_sqr());
    }
    Ok(total.value())
}

/// Spherical-average L2 of the good part: bad-tube wave-packet
/// contributions of `mu_1` are removed sector by sector through the smooth
/// tube partition. Reports the mean square, the retained mass, the
/// comparison quantity `R^{-(d-1)} int |hat mu_1|^2 psi_R`, and the gain
/// exponent when defined.
pub fn good_spherical_l2(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    split: &GoodBadSplit,
    big_r: f64,
    sphere_nodes: usize,
) -> Result<ExperimentReport> {
    let d = mu1.dim;
    if big_r < 4.0 {
        return Err(Error::InvalidScale("R must be >= 4".to_string()));
    }
    if sphere_nodes < required_sphere_nodes(d, big_r) {
        return Err(Error::Resolution(alloc::format!(
            "{sphere_nodes} sphere nodes < required {}",
            required_sphere_nodes(d, big_r)
        )));
    }
    let nodes = sphere_points(d, sphere_nodes);
    let n = nodes.len() as f64;
    // sector of each node: the nearest tube-group direction
    let groups = &split.family.groups;
    let node_group: Vec<usize> = nodes
        .iter()
        .map(|w| {
            let mut best = 0;
            let mut best_dot = f64::NEG_INFINITY;
            for (gi, g) in groups.iter().enumerate() {
                let dot = sum_f64(w.iter().zip(&g.direction).map(|(a, b)| a * b));
                if dot > best_dot {
                    best_dot = dot;
                    best = gi;
                }
            }
            best
        })
        .collect();
    let good_set: alloc::collections::BTreeSet<usize> = split.good.iter().copied().collect();
    let mut w_cache: alloc::collections::BTreeMap<(usize, usize), f64> =
        alloc::collections::BTreeMap::new();
    let mut weight_of = |gi: usize, ai: usize, atom: &[f64]| -> f64 {
        if let Some(&w) = w_cache.get(&(gi, ai)) {
            return w;
        }
        let w = sum_f64(
            partition_weights(&split.family, gi, atom)
                .into_iter()
                .filter_map(|(tid, eta)| {
                    if good_set.contains(&tid) {
                        Some(eta)
                    } else {
                        None
                    }
                }),
        );
        w_cache.insert((gi, ai), w);
        w
    };
    let scaled: Vec<Vec<f64>> = nodes
        .iter()
        .map(|w| w.iter().map(|v| v * big_r).collect())
        .collect();
    // S_k = sum_a m_a w_{sector(k)}(a) e^{-i R omega_k . a}
    let mut s: Vec<Complex64> = Vec::with_capacity(nodes.len());
    for (k, w) in scaled.iter().enumerate() {
        let gi = node_group[k];
        let mut acc = ComplexSum::new();
        for ai in 0..mu1.len() {
            let atom = mu1.atom(ai).to_vec();
            let wt = weight_of(gi, ai, &atom);
            if wt == 0.0 {
                continue;
            }
            let phase = -sum_f64(atom.iter().zip(w).map(|(a, b)| a * b));
            let (si, co) = phase.sin_cos();
            acc.add(Complex64::new(co, si) * (mu1.masses[ai] * wt));
        }
        s.push(acc.value());
    }
    let mut total = crate::sums::NeumaierSum::new();
    for b in 0..mu2.len() {
        let x = mu2.atom(b);
        let mut acc = ComplexSum::new();
        for (k, w) in scaled.iter().enumerate() {
            let phase = sum_f64(x.iter().zip(w).map(|(a, b)| a * b));
            let (si, co) = phase.sin_cos();
            acc.add(Complex64::new(co, si) * s[k]);
        }
        let g = acc.value() / n;
        total.add(mu2.masses[b] * g.norm_sqr());
    }
    let good_l2 = total.value();
    // retained mass: mu_1 weighted by the sector-averaged good fraction
    let mut mass_acc = crate::sums::NeumaierSum::new();
    for ai in 0..mu1.len() {
        let atom = mu1.atom(ai).to_vec();
        let mean_w =
            sum_f64((0..groups.len()).map(|gi| weight_of(gi, ai, &atom))) / groups.len() as f64;
        mass_acc.add(mu1.masses[ai] * mean_w);
    }
    let mu1g_mass = mass_acc.value();
    // comparison: R^{-(d-1)} int |hat mu_1|^2 psi_R over shells near R
    let psi = |rho: f64| (1.0 + (big_r - rho).abs()).powi(-100);
    let sphere_area = (d as f64) * crate::sharp_example::unit_ball_volume(d);
    let shell_step = 0.5;
    let mut integral = crate::sums::NeumaierSum::new();
    let mut rho = (big_r - 3.0).max(0.5);
    while rho <= big_r + 3.0 {
        let mut shell_mean = crate::sums::NeumaierSum::new();
        for w in &nodes {
            let omega: Vec<f64> = w.iter().map(|v| v * rho).collect();
            shell_mean.add(measure_fourier(mu1, &omega).norm_sqr());
        }
        let mean = shell_mean.value() / n;
        integral.add(shell_step * rho.powi(d as i32 - 1) * sphere_area * mean * psi(rho));
        rho += shell_step;
    }
    let comparison = big_r.powi(-(d as i32 - 1)) * integral.value();
    let mut rep = ExperimentReport::new();
    rep.push("good_l2", good_l2)?;
    rep.push("mu1g_mass", mu1g_mass)?;
    rep.push("comparison_integral", comparison)?;
    rep.push("good_count", split.good.len() as f64)?;
    rep.push("bad_count", split.bad.len() as f64)?;
    if d >= 3 {
        let gamma = gamma_exponent(d, split.params.alpha)?;
        rep.push("gamma_exponent", gamma)?;
        if comparison > 0.0 {
            rep.push(
                "good_l2_over_predicted",
                good_l2 / (big_r.powf(-gamma) * comparison),
            )?;
        }
    }
    Ok(rep)
}
