//! Measurement side of the lab: weighted Lp norms over cube regions,
//! tube/cube incidence counting, decoupling ratios with their theoretical
//! exponent bundles, and log-log slope fitting.

use crate::extension::{SampledField, WavePacketSet};
use crate::geometry::{ScaleMode, Tube};
use crate::report::ExperimentReport;
use crate::sums::sum_f64;
use crate::weights::Weight;
use crate::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Spatial region descriptors used by norm computations.
#[derive(Clone, Debug)]
pub enum Region {
    /// all sample points
    All,
    /// closed ball of given radius about the origin
    Ball { radius: f64 },
    /// product `B^{first}(0, r_first) x B^{dim-first}(0, r_rest)`
    ProductBalls { first: usize, r_first: f64, r_rest: f64 },
    /// union of origin-anchored lattice cubes of the given side
    CubeUnion {
        side: f64,
        cubes: alloc::collections::BTreeSet<Vec<i64>>,
    },
}

impl Region {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::All => true,
            Region::Ball { radius } => sum_f64(x.iter().map(|v| v * v)).sqrt() <= *radius,
            Region::ProductBalls {
                first,
                r_first,
                r_rest,
            } => {
                let a = sum_f64(x[..*first].iter().map(|v| v * v)).sqrt();
                let b = sum_f64(x[*first..].iter().map(|v| v * v)).sqrt();
                a <= *r_first && b <= *r_rest
            }
            Region::CubeUnion { side, cubes } => {
                let key: Vec<i64> = x.iter().map(|&v| (v / side).floor() as i64).collect();
                cubes.contains(&key)
            }
        }
    }
}

/// `(sum_x w(x) H(x) |f(x)|^p)^{1/p}` over the sample points inside the
/// region, `H = 1` when absent. Point order is the field's storage order.
pub fn weighted_lp_norm(
    f: &SampledField,
    region: &Region,
    h: Option<&Weight>,
    p: f64,
) -> Result<f64> {
    if p <= 0.0 {
        return Err(Error::Domain(alloc::format!("p = {p} must be positive")));
    }
    let mut any = false;
    let total = sum_f64((0..f.len()).filter_map(|i| {
        let x = f.point(i);
        if !region.contains(x) {
            return None;
        }
        any = true;
        let hv = h.map(|w| w.eval(x)).unwrap_or(1.0);
        if hv == 0.0 {
            return Some(0.0);
        }
        Some(f.point_weights[i] * hv * f.values[i].norm().powf(p))
    }));
    if !any {
        return Err(Error::EmptyRegion("no sample points in region".to_string()));
    }
    Ok(total.powf(1.0 / p))
}

/// Exact distance from a segment to an axis-aligned box. The squared
/// distance is piecewise quadratic in the segment parameter with breaks
/// where a coordinate crosses a box face; each piece is minimized in
/// closed form.
pub(crate) fn segment_box_distance(a: &[f64], b: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let d = a.len();
    let mut breaks = alloc::vec![0.0_f64, 1.0];
    for i in 0..d {
        let dir = b[i] - a[i];
        if dir.abs() > 1e-300 {
            for bound in [lo[i], hi[i]] {
                let t = (bound - a[i]) / dir;
                if t > 0.0 && t < 1.0 {
                    breaks.push(t);
                }
            }
        }
    }
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let dist_sq_at = |t: f64| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            let p = a[i] + t * (b[i] - a[i]);
            let c = p.clamp(lo[i], hi[i]);
            s += (p - c) * (p - c);
        }
        s
    };
    let mut best = dist_sq_at(0.0).min(dist_sq_at(1.0));
    for w in breaks.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 < 1e-300 {
            continue;
        }
        let tm = 0.5 * (t0 + t1);
        // on this piece the clamp pattern is fixed: accumulate the
        // quadratic coefficients of dist^2(t)
        let (mut qa, mut qb) = (0.0, 0.0);
        for i in 0..d {
            let p = a[i] + tm * (b[i] - a[i]);
            if p < lo[i] || p > hi[i] {
                let bound = if p < lo[i] { lo[i] } else { hi[i] };
                let dir = b[i] - a[i];
                let off = a[i] - bound;
                qa += dir * dir;
                qb += 2.0 * dir * off;
            }
        }
        if qa > 0.0 {
            let t_star = (-qb / (2.0 * qa)).clamp(t0, t1);
            best = best.min(dist_sq_at(t_star));
        } else {
            best = best.min(dist_sq_at(tm));
        }
    }
    best.max(0.0).sqrt()
}

/// Per-cube tube counts over an origin-anchored lattice of the given side.
#[derive(Clone, Debug)]
pub struct IncidenceProfile {
    pub cube_side: f64,
    /// occupied cubes only
    pub per_cube_counts: BTreeMap<Vec<i64>, u32>,
    /// largest per-cube count (0 for an empty family)
    pub max_count: u32,
}

impl IncidenceProfile {
    pub fn occupied_cubes(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.per_cube_counts.keys()
    }

    /// Region formed by the cubes with count at least `threshold`.
    pub fn region_above(&self, threshold: u32) -> Region {
        Region::CubeUnion {
            side: self.cube_side,
            cubes: self
                .per_cube_counts
                .iter()
                .filter(|(_, &c)| c >= threshold)
                .map(|(k, _)| k.clone())
                .collect(),
        }
    }

    /// Region of all occupied cubes.
    pub fn region_all(&self) -> Region {
        self.region_above(1)
    }

    /// Diagnostic pigeonholing data: for each dyadic class `2^t`, the
    /// number of cubes whose count lies in `[2^t, 2^{t+1})`.
    pub fn dyadic_class_histogram(&self) -> Vec<(u32, usize)> {
        let mut out = Vec::new();
        let mut class = 1u32;
        while class <= self.max_count {
            let hi = class.saturating_mul(2);
            let n = self
                .per_cube_counts
                .values()
                .filter(|&&c| c >= class && c < hi)
                .count();
            if n > 0 {
                out.push((class, n));
            }
            class = hi;
        }
        out
    }
}

/// Counts, per lattice cube of side `cube_side`, the tubes whose
/// `dilation`-dilate meets the cube. Candidate cubes are gathered by
/// walking the axis at half-cube steps and taking a radius-sized
/// neighborhood, then tested exactly.
pub fn incidence_profile(tubes: &[Tube], cube_side: f64, dilation: f64) -> IncidenceProfile {
    let mut counts: BTreeMap<Vec<i64>, u32> = BTreeMap::new();
    for t in tubes {
        let d = t.dim();
        let (e0, e1) = t.endpoints();
        let rad = t.radius * dilation;
        let reach = (rad / cube_side).ceil() as i64 + 2;
        let steps = (2.0 * t.length / cube_side).ceil() as usize + 1;
        let mut candidates: alloc::collections::BTreeSet<Vec<i64>> =
            alloc::collections::BTreeSet::new();
        for s in 0..=steps {
            let tt = s as f64 / steps as f64;
            let center: Vec<i64> = (0..d)
                .map(|i| ((e0[i] + tt * (e1[i] - e0[i])) / cube_side).floor() as i64)
                .collect();
            let mut off = vec![-reach; d];
            'nbhd: loop {
                candidates.insert(center.iter().zip(&off).map(|(c, o)| c + o).collect());
                let mut ax = 0;
                loop {
                    if ax == d {
                        break 'nbhd;
                    }
                    off[ax] += 1;
                    if off[ax] <= reach {
                        break;
                    }
                    off[ax] = -reach;
                    ax += 1;
                }
            }
        }
        for idx in candidates {
            let lo: Vec<f64> = idx.iter().map(|&k| k as f64 * cube_side).collect();
            let hi: Vec<f64> = idx.iter().map(|&k| (k + 1) as f64 * cube_side).collect();
            if segment_box_distance(&e0, &e1, &lo, &hi) <= rad {
                *counts.entry(idx).or_insert(0) += 1;
            }
        }
    }
    let max_count = counts.values().copied().max().unwrap_or(0);
    IncidenceProfile {
        cube_side,
        per_cube_counts: counts,
        max_count,
    }
}

/// Incidence of a scale-R tube family with the `R^{1/2}`-cube lattice.
pub fn incidence_count(tubes: &[Tube], big_r: f64, d: usize) -> Result<IncidenceProfile> {
    for t in tubes {
        if t.mode != ScaleMode::ScaleR {
            return Err(Error::ScaleMismatch(
                "incidence_count expects scale-R tubes".to_string(),
            ));
        }
        if t.dim() != d {
            return Err(Error::InvalidDimension(alloc::format!(
                "tube dimension {} != {d}",
                t.dim()
            )));
        }
    }
    Ok(incidence_profile(tubes, big_r.sqrt(), 1.0))
}

/// Which refined-decoupling inequality a measurement refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseVariant {
    /// unweighted, exponent gamma_m(p)
    A,
    /// weighted by H with ball condition at scale R^{1/2}
    B,
    /// weighted, frequencies r-concentrated near an m-plane
    C,
}

/// Parameters of one decoupling measurement.
#[derive(Clone, Debug)]
pub struct DecouplingCase {
    pub variant: CaseVariant,
    pub d: usize,
    pub m: usize,
    pub p: f64,
    /// weight dimension (variants B and C)
    pub alpha: Option<f64>,
    /// plate scale (variant C)
    pub r: Option<f64>,
    pub big_r: f64,
}

/// Critical exponent `p_k = 2(k+1)/(k-1)`.
pub fn critical_p(k: usize) -> f64 {
    2.0 * (k as f64 + 1.0) / (k as f64 - 1.0)
}

impl DecouplingCase {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 || self.m > self.d {
            return Err(Error::InvalidCase(alloc::format!(
                "m = {} outside [2, {}]",
                self.m,
                self.d
            )));
        }
        if self.big_r < 4.0 {
            return Err(Error::InvalidCase("R must be >= 4".to_string()));
        }
        let pm = critical_p(self.m);
        let pd = critical_p(self.d);
        match self.variant {
            CaseVariant::A => {
                if self.p < 2.0 {
                    return Err(Error::InvalidCase("variant a needs p >= 2".to_string()));
                }
            }
            CaseVariant::B => {
                if self.p < 2.0 || self.p > pm + 1e-12 {
                    return Err(Error::InvalidCase(alloc::format!(
                        "variant b needs 2 <= p <= p_m = {pm}"
                    )));
                }
                if self.alpha.is_none() {
                    return Err(Error::InvalidCase("variant b needs alpha".to_string()));
                }
            }
            CaseVariant::C => {
                if self.p < pd - 1e-12 || self.p > pm + 1e-12 {
                    return Err(Error::InvalidCase(alloc::format!(
                        "variant c needs p_d = {pd} <= p <= p_m = {pm}"
                    )));
                }
                let r = self
                    .r
                    .ok_or_else(|| Error::InvalidCase("variant c needs r".to_string()))?;
                let rmin = self.big_r.powf(-0.5);
                if !(rmin - 1e-12..=1.0 + 1e-12).contains(&r) {
                    return Err(Error::InvalidCase(alloc::format!(
                        "variant c needs R^-1/2 <= r <= 1, got {r}"
                    )));
                }
                if self.alpha.is_none() {
                    return Err(Error::InvalidCase("variant c needs alpha".to_string()));
                }
            }
        }
        Ok(())
    }
}

/// Predicted exponents: the bound scales like
/// `R^{big_r_exponent} * r^{r_exponent}` (variant c's `big_r_exponent`
/// applies to the combined factor `r^2 R`, which is where its doubled
/// contribution to `r_exponent` comes from).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentBundle {
    pub big_r_exponent: f64,
    pub r_exponent: f64,
}

/// Theoretical exponent bundle of a validated case.
pub fn theoretical_exponent(case: &DecouplingCase) -> Result<ExponentBundle> {
    case.validate()?;
    let pm = critical_p(case.m);
    let p = case.p;
    Ok(match case.variant {
        CaseVariant::A => {
            let gamma = if p <= pm {
                0.0
            } else {
                (case.m as f64 - 1.0) / 4.0 - (case.m as f64 + 1.0) / (2.0 * p)
            };
            ExponentBundle {
                big_r_exponent: gamma,
                r_exponent: 0.0,
            }
        }
        CaseVariant::B => {
            let alpha = case.alpha.unwrap();
            ExponentBundle {
                big_r_exponent: 0.5 * (alpha - case.d as f64) * (1.0 / p - 1.0 / pm),
                r_exponent: 0.0,
            }
        }
        CaseVariant::C => {
            let alpha = case.alpha.unwrap();
            let rsq_exp = (case.d as f64 - 1.0) / 4.0 - (case.d as f64 + 1.0) / (2.0 * p);
            ExponentBundle {
                big_r_exponent: rsq_exp,
                r_exponent: (case.d as f64 - alpha) * (1.0 / p - 1.0 / pm) + 2.0 * rsq_exp,
            }
        }
    })
}

/// Measures both sides of the refined decoupling inequality on a packet
/// set: `LHS = ||sum_T f_T||_{L^p(Y; H dx)}`,
/// `RHS = M^{1/2 - 1/p} (sum_T ||f_T||_p^p)^{1/p}` with the packet norms
/// taken over the full sampled region.
pub fn decoupling_ratio(
    packets: &WavePacketSet,
    region: &Region,
    h: Option<&Weight>,
    case: &DecouplingCase,
    m_count: u32,
) -> Result<ExperimentReport> {
    case.validate()?;
    if (packets.scale - case.big_r).abs() > 1e-9 * case.big_r.max(1.0) {
        return Err(Error::ScaleMismatch(alloc::format!(
            "packet scale {} != case R {}",
            packets.scale,
            case.big_r
        )));
    }
    let p = case.p;
    let f = packets.sum_field();
    let lhs = weighted_lp_norm(&f, region, h, p)?;
    let packet_pow = sum_f64(
        packets
            .packets
            .iter()
            .map(|pk| pk.lp_pow(&packets.point_weights, p)),
    );
    let m_eff = (m_count.max(1)) as f64;
    let rhs = m_eff.powf(0.5 - 1.0 / p) * packet_pow.powf(1.0 / p);
    let exps = theoretical_exponent(case)?;
    let mut rep = ExperimentReport::new();
    rep.push("lhs_norm", lhs)?;
    rep.push("rhs_norm", rhs)?;
    rep.push("ratio", if rhs > 0.0 { lhs / rhs } else { 0.0 })?;
    rep.push("m_count", m_count as f64)?;
    rep.push("packet_count", packets.packets.len() as f64)?;
    rep.push("exponent_big_r", exps.big_r_exponent)?;
    rep.push("exponent_r", exps.r_exponent)?;
    Ok(rep)
}

/// Ordinary least squares on `(log R, log value)`.
/// Returns `(slope, intercept, stderr_of_slope)`; the stderr is 0 for two
/// points (exact interpolation).
pub fn exponent_fit(samples: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(alloc::format!(
            "{} samples, need >= 2",
            samples.len()
        )));
    }
    for &(r, v) in samples {
        if r <= 0.0 || v <= 0.0 {
            return Err(Error::Domain(alloc::format!(
                "samples must be positive, got ({r}, {v})"
            )));
        }
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|&(r, _)| r.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, v)| v.ln()).collect();
    let xbar = sum_f64(xs.iter().copied()) / n;
    let ybar = sum_f64(ys.iter().copied()) / n;
    let sxx = sum_f64(xs.iter().map(|x| (x - xbar) * (x - xbar)));
    if sxx <= 1e-24 {
        return Err(Error::InsufficientData(
            "all sample scales coincide".to_string(),
        ));
    }
    let sxy = sum_f64(xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)));
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let stderr = if samples.len() == 2 {
        0.0
    } else {
        let ss_res = sum_f64(
            xs.iter()
                .zip(&ys)
                .map(|(x, y)| {
                    let r = y - (intercept + slope * x);
                    r * r
                }),
        );
        (ss_res / (n - 2.0) / sxx).sqrt()
    };
    Ok((slope, intercept, stderr))
}
