//! The explicit extremal configuration for weighted decoupling: a frequency
//! set of small balls on a sparse lattice (Omega), a spatial lattice of
//! small cells (Lambda) on which the extension is fully coherent, the slab
//! region Y, and the indicator weight H.
//!
//! Coordinates are split `x = (x', x'', x_d)` with `x'` of dimension
//! `d - m`, `x''` of dimension `m - 1`; frequencies split `xi = (xi', xi'')`
//! the same way. The `x'` ball factor of Lambda is collapsed onto its
//! center with a volume weight: the phase varies by at most `c^2` across
//! it, far below the coherence scale.

use crate::decoupling::{
    decoupling_ratio, incidence_count, weighted_lp_norm, CaseVariant, DecouplingCase,
    IncidenceProfile, Region,
};
use crate::extension::{
    decompose_wave_packets, extend, FrequencySet, SamplingLattice, WavePacketSet,
};
use crate::geometry::{build_caps, build_tube_family_for_caps, Cap, ScaleMode, Tube, TubeFamily};
use crate::report::ExperimentReport;
use crate::sums::sum_f64;
use crate::weights::Weight;
use crate::{Error, Result};
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

const TAU: f64 = 2.0 * core::f64::consts::PI;

/// Volume of the unit ball in `R^k` (`k = 0` gives 1).
pub fn unit_ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(k - 2) * TAU / k as f64,
    }
}

/// The lattice exponent `kappa = (d - alpha) / (2 (m + 1))`; at most 1/4 on
/// the admissible range `d - (m+1)/2 <= alpha <= d`.
pub fn kappa_from_alpha(d: usize, m: usize, alpha: f64) -> Result<f64> {
    if m < 2 || m > d {
        return Err(Error::InvalidDimension(alloc::format!(
            "m = {m} outside [2, {d}]"
        )));
    }
    let lo = d as f64 - (m as f64 + 1.0) / 2.0;
    if !(lo - 1e-12..=d as f64 + 1e-12).contains(&alpha) {
        return Err(Error::OutOfRange(alloc::format!(
            "alpha = {alpha} outside [{lo}, {d}]"
        )));
    }
    Ok((d as f64 - alpha) / (2.0 * (m as f64 + 1.0)))
}

/// Options controlling the Lambda enumeration.
#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// largest number of Lambda lattice points enumerated exactly
    pub budget: usize,
    /// allow deterministic strided subsampling above the budget
    pub allow_subsample: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            budget: 1_000_000,
            allow_subsample: true,
        }
    }
}

/// One built configuration.
#[derive(Clone, Debug)]
pub struct ExampleInstance {
    pub d: usize,
    pub m: usize,
    pub alpha: f64,
    pub kappa: f64,
    pub big_r: f64,
    pub c: f64,
    /// frequency quadrature over Omega (3^{d-1} stencil per lattice ball)
    pub omega: FrequencySet,
    pub caps: Vec<Cap>,
    /// caps that carry Omega nodes
    pub active_caps: Vec<usize>,
    /// number of xi'' lattice cells of Omega
    pub omega_lattice_count: u64,
    /// Lebesgue measure of Omega (equals the quadrature mass)
    pub omega_measure: f64,
    /// Lambda sample: lattice-cell representatives with volume weights
    pub lambda: SamplingLattice,
    /// lattice points before subsampling
    pub lambda_lattice_count: u64,
    /// weight multiplier applied by subsampling (1 when exact)
    pub inflation: f64,
    pub lambda_volume: f64,
    pub y: Region,
    /// predicted incidence count `R^{kappa (m-1)}`
    pub m_predicted: f64,
    /// spacing of the x'' lattice (`R^kappa`)
    pub xdd_spacing: f64,
    /// spacing of the x_d lattice (`R^{2 kappa} / 2 pi`)
    pub xd_spacing: f64,
}

/// Builds the configuration with default options.
pub fn build_sharp_example(
    d: usize,
    m: usize,
    alpha: f64,
    big_r: f64,
    c: f64,
) -> Result<ExampleInstance> {
    build_sharp_example_with(d, m, alpha, big_r, c, BuildOptions::default())
}

/// Builds the configuration; errors when the Lambda enumeration exceeds the
/// budget and subsampling is disabled.
pub fn build_sharp_example_with(
    d: usize,
    m: usize,
    alpha: f64,
    big_r: f64,
    c: f64,
    opts: BuildOptions,
) -> Result<ExampleInstance> {
    let kappa = kappa_from_alpha(d, m, alpha)?;
    if big_r < 64.0 {
        return Err(Error::InvalidScale(alloc::format!(
            "R = {big_r} must be >= 64"
        )));
    }
    if !(0.0 < c && c <= 0.01) {
        return Err(Error::InvalidScale(alloc::format!(
            "c = {c} outside (0, 1/100]"
        )));
    }
    let caps = build_caps(big_r, d)?;
    let freq_dim = d - 1;
    let n_prime = d - m; // xi' dimension
    let n_dd = m - 1; // xi'' dimension

    // ---- Omega: lattice balls in xi'' crossed with one ball in xi' ----
    let xi_lat = TAU * big_r.powf(-kappa);
    let rho_prime = c * big_r.powf(-0.5);
    let rho_dd = c * big_r.powf(-1.0);
    let margin = rho_prime * (n_prime.max(1) as f64).sqrt() + rho_dd * (n_dd.max(1) as f64).sqrt();
    let qmax = if n_dd == 0 {
        0
    } else {
        ((1.0 - margin) / xi_lat).floor() as i64
    };
    let mut centers: Vec<Vec<f64>> = Vec::new();
    let mut q = vec![-qmax; n_dd];
    loop {
        let center: Vec<f64> = q.iter().map(|&k| k as f64 * xi_lat).collect();
        if sum_f64(center.iter().map(|v| v * v)).sqrt() <= 1.0 - margin {
            centers.push(center);
        }
        if n_dd == 0 {
            break;
        }
        let mut ax = 0;
        let mut done = false;
        loop {
            if ax == n_dd {
                done = true;
                break;
            }
            q[ax] += 1;
            if q[ax] <= qmax {
                break;
            }
            q[ax] = -qmax;
            ax += 1;
        }
        if done {
            break;
        }
    }
    let omega_lattice_count = centers.len() as u64;
    let cell_measure = unit_ball_volume(n_prime)
        * rho_prime.powi(n_prime as i32)
        * unit_ball_volume(n_dd)
        * rho_dd.powi(n_dd as i32);
    let omega_measure = cell_measure * omega_lattice_count as f64;
    // 3^{d-1} midpoint stencil per cell, equal weights
    let stencil_1d = [-2.0 / 3.0, 0.0, 2.0 / 3.0];
    let stencil_count = 3usize.pow(freq_dim as u32);
    let node_weight = cell_measure / stencil_count as f64;
    let mut nodes: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for center in &centers {
        let mut s = vec![0usize; freq_dim];
        loop {
            for (ax, &si) in s.iter().enumerate() {
                let off = stencil_1d[si];
                if ax < n_prime {
                    nodes.push(off * rho_prime);
                } else {
                    nodes.push(center[ax - n_prime] + off * rho_dd);
                }
            }
            weights.push(node_weight);
            let mut ax = 0;
            let mut done = false;
            loop {
                if ax == freq_dim {
                    done = true;
                    break;
                }
                s[ax] += 1;
                if s[ax] < 3 {
                    break;
                }
                s[ax] = 0;
                ax += 1;
            }
            if done {
                break;
            }
        }
    }
    let n_nodes = weights.len();
    let cap_of = crate::extension::label_caps(&caps, freq_dim, &nodes);
    if cap_of.iter().any(|&c| c == usize::MAX) {
        return Err(Error::Domain(
            "omega node outside the cap tiling".to_string(),
        ));
    }
    let omega = FrequencySet {
        freq_dim,
        nodes,
        weights,
        values: vec![Complex64::new(1.0, 0.0); n_nodes],
        cap_of,
    };
    let mut active_caps = omega.active_caps();
    active_caps.sort_unstable();

    // ---- Lambda: x'' and x_d lattices, x' ball collapsed ----
    let xdd_spacing = big_r.powf(kappa);
    let xd_spacing = big_r.powf(2.0 * kappa) / TAU;
    let reach = (big_r * big_r - c * c * big_r).max(0.0).sqrt() - 2.0 * c * (m as f64).sqrt();
    let kmax_dd = (reach / xdd_spacing).floor() as i64;
    let kmax_d = (reach / xd_spacing).floor() as i64;
    // count lattice points inside the ball |(x'', x_d)| <= reach
    let mut lattice_count: u64 = 0;
    {
        let mut k = vec![-kmax_dd; n_dd];
        let mut done = false;
        while !done {
            let rr = sum_f64(k.iter().map(|&v| {
                let x = v as f64 * xdd_spacing;
                x * x
            }));
            if rr <= reach * reach {
                let room = (reach * reach - rr).sqrt();
                let nd = (room / xd_spacing).floor() as i64;
                lattice_count += (2 * nd + 1) as u64;
            }
            if n_dd == 0 {
                break;
            }
            let mut ax = 0;
            loop {
                if ax == n_dd {
                    done = true;
                    break;
                }
                k[ax] += 1;
                if k[ax] <= kmax_dd {
                    break;
                }
                k[ax] = -kmax_dd;
                ax += 1;
            }
        }
    }
    if lattice_count == 0 {
        return Err(Error::InvalidScale(
            "no Lambda lattice points; R too small for this kappa".to_string(),
        ));
    }
    let mut stride: u64 = 1;
    if lattice_count > opts.budget as u64 {
        if !opts.allow_subsample {
            return Err(Error::Budget(alloc::format!(
                "Lambda needs {lattice_count} points, budget {}",
                opts.budget
            )));
        }
        stride = lattice_count.div_ceil(opts.budget as u64);
        // avoid resonance with the x_d run length
        let run = (2 * kmax_d + 1) as u64;
        while stride > 1 && run % stride == 0 {
            stride += 1;
        }
    }
    let x_prime_vol = unit_ball_volume(n_prime) * (c * big_r.sqrt()).powi(n_prime as i32);
    let cell_vol_dd = unit_ball_volume(n_dd) * c.powi(n_dd as i32);
    let point_weight = x_prime_vol * cell_vol_dd * 2.0 * c;
    let mut points: Vec<f64> = Vec::new();
    let mut flat: u64 = 0;
    let mut kept: u64 = 0;
    {
        let mut k = vec![-kmax_dd; n_dd];
        let mut done = false;
        while !done {
            let rr = sum_f64(k.iter().map(|&v| {
                let x = v as f64 * xdd_spacing;
                x * x
            }));
            if rr <= reach * reach {
                let room = (reach * reach - rr).sqrt();
                let nd = (room / xd_spacing).floor() as i64;
                for n in -nd..=nd {
                    if flat % stride == 0 {
                        for _ in 0..n_prime {
                            points.push(0.0);
                        }
                        for &kk in k.iter() {
                            points.push(kk as f64 * xdd_spacing);
                        }
                        points.push(n as f64 * xd_spacing);
                        kept += 1;
                    }
                    flat += 1;
                }
            }
            if n_dd == 0 {
                break;
            }
            let mut ax = 0;
            loop {
                if ax == n_dd {
                    done = true;
                    break;
                }
                k[ax] += 1;
                if k[ax] <= kmax_dd {
                    break;
                }
                k[ax] = -kmax_dd;
                ax += 1;
            }
        }
    }
    let inflation = stride as f64;
    let lambda = SamplingLattice {
        dim: d,
        points,
        weights: vec![point_weight * inflation; kept as usize],
        scale: big_r,
    };
    let lambda_volume = point_weight * lattice_count as f64;
    let y = Region::ProductBalls {
        first: n_prime,
        r_first: c * big_r.sqrt(),
        r_rest: big_r,
    };
    Ok(ExampleInstance {
        d,
        m,
        alpha,
        kappa,
        big_r,
        c,
        omega,
        caps,
        active_caps,
        omega_lattice_count,
        omega_measure,
        lambda,
        lambda_lattice_count: lattice_count,
        inflation,
        lambda_volume,
        y,
        m_predicted: big_r.powf(kappa * (m as f64 - 1.0)),
        xdd_spacing,
        xd_spacing,
    })
}

impl ExampleInstance {
    /// The indicator weight `H = chi_Lambda` on cells of side `2c`. The
    /// collapsed `x'` ball factor is re-expanded onto the cell grid.
    pub fn weight(&self) -> Result<Weight> {
        let cell = 2.0 * self.c;
        let n_prime = self.d - self.m;
        let r_prime = self.c * self.big_r.sqrt();
        let per_axis = if n_prime == 0 {
            1
        } else {
            (2.0 * r_prime / cell).ceil() as usize + 1
        };
        let expanded = self.lambda.len() * per_axis.pow(n_prime as u32);
        if expanded > 8_000_000 {
            return Err(Error::Budget(alloc::format!(
                "indicator weight needs {expanded} cells"
            )));
        }
        let mut cells = alloc::collections::BTreeMap::new();
        for i in 0..self.lambda.len() {
            let x = self.lambda.point(i);
            let kmax = if n_prime == 0 {
                0
            } else {
                (r_prime / cell).ceil() as i64
            };
            let mut prime_idx = vec![-kmax; n_prime];
            loop {
                let centers: Vec<f64> = prime_idx
                    .iter()
                    .map(|&k| (k as f64 + 0.5) * cell)
                    .collect();
                let inside =
                    n_prime == 0 || sum_f64(centers.iter().map(|v| v * v)).sqrt() <= r_prime;
                if inside {
                    let mut key: Vec<i64> = Vec::with_capacity(self.d);
                    key.extend_from_slice(&prime_idx);
                    for &v in &x[n_prime..] {
                        key.push((v / cell).floor() as i64);
                    }
                    cells.insert(key, 1.0);
                }
                if n_prime == 0 {
                    break;
                }
                let mut ax = 0;
                let mut done = false;
                loop {
                    if ax == n_prime {
                        done = true;
                        break;
                    }
                    prime_idx[ax] += 1;
                    if prime_idx[ax] <= kmax {
                        break;
                    }
                    prime_idx[ax] = -kmax;
                    ax += 1;
                }
                if done {
                    break;
                }
            }
        }
        Ok(Weight {
            dim: self.d,
            cell_size: cell,
            cells,
            cell_volume: cell.powi(self.d as i32),
            c1: None,
        })
    }

    /// Phase-stencil sample of Lambda: cell centers plus offsets of 2c/3 in
    /// each x''-axis and in x_d, capped at `max_points` lattice points.
    pub fn lambda_phase_sample(&self, max_points: usize) -> Vec<Vec<f64>> {
        let n_prime = self.d - self.m;
        let step = (self.lambda.len() / max_points.max(1)).max(1);
        let mut out = Vec::new();
        for i in (0..self.lambda.len()).step_by(step) {
            let x = self.lambda.point(i).to_vec();
            out.push(x.clone());
            for ax in n_prime..self.d {
                for sgn in [-1.0, 1.0] {
                    let mut y = x.clone();
                    y[ax] += sgn * 2.0 * self.c / 3.0;
                    out.push(y);
                }
            }
        }
        out
    }
}

/// Distance of a phase to the nearest multiple of `2 pi`.
fn phase_dist(phase: f64) -> f64 {
    let mut r = phase % TAU;
    if r < 0.0 {
        r += TAU;
    }
    r.min(TAU - r)
}

/// Largest distance of the extension phase from `2 pi Z` over sampled
/// `(x, xi)` pairs of Lambda x Omega.
pub fn phase_deviation(inst: &ExampleInstance) -> f64 {
    max_phase_deviation(&inst.omega, &inst.lambda_phase_sample(2000))
}

/// The same maximum for an explicit spatial sample.
pub fn max_phase_deviation(omega: &FrequencySet, points: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0_f64;
    for x in points {
        let d = x.len();
        for j in 0..omega.len() {
            let xi = omega.node(j);
            let mut phase = 0.0;
            let mut xi2 = 0.0;
            for k in 0..d - 1 {
                phase += x[k] * xi[k];
                xi2 += xi[k] * xi[k];
            }
            phase += x[d - 1] * xi2;
            worst = worst.max(phase_dist(phase));
        }
    }
    worst
}

/// Heavy artifacts of one instance: the ambient-lattice packet set for the
/// tubes contained in Y, their ids, and the incidence profile.
pub struct ExamplePackets {
    pub family: TubeFamily,
    /// tubes contained in Y
    pub w_ids: Vec<usize>,
    pub packets: WavePacketSet,
    pub incidence: IncidenceProfile,
}

/// Whether all boundary samples of the tube lie in the region.
fn tube_in_region(t: &Tube, region: &Region) -> bool {
    let d = t.dim();
    let cross = crate::linalg::complete_basis(core::slice::from_ref(&t.direction), d);
    let cross = &cross[1..];
    for ring in 0..8 {
        let s = t.length / 2.0 * (2.0 * ring as f64 / 7.0 - 1.0);
        let center: Vec<f64> = (0..d)
            .map(|i| t.axis_point[i] + s * t.direction[i])
            .collect();
        if !region.contains(&center) {
            return false;
        }
        let ngen = 1usize << d;
        for gen in 0..ngen {
            let phi = TAU * gen as f64 / ngen as f64;
            let z: Vec<f64> = if d == 2 {
                let sgn = if gen % 2 == 0 { 1.0 } else { -1.0 };
                (0..d)
                    .map(|i| center[i] + sgn * t.radius * cross[0][i])
                    .collect()
            } else {
                (0..d)
                    .map(|i| {
                        center[i] + t.radius * (phi.cos() * cross[0][i] + phi.sin() * cross[1][i])
                    })
                    .collect()
            };
            if !region.contains(&z) {
                return false;
            }
        }
    }
    true
}

/// Builds tube family, W, packets on an ambient lattice of spacing
/// `R^{1/2} / 4`, and the incidence profile of W.
pub fn example_packets(inst: &ExampleInstance) -> Result<ExamplePackets> {
    let active: Vec<Cap> = inst
        .active_caps
        .iter()
        .map(|&i| inst.caps[i].clone())
        .collect();
    let mut family = build_tube_family_for_caps(&active, inst.big_r, 0.0, ScaleMode::ScaleR)?;
    // relabel groups with the original cap ids so packets line up with g
    for (gi, grp) in family.groups.iter_mut().enumerate() {
        grp.cap_index = Some(inst.active_caps[gi]);
    }
    let w_ids: Vec<usize> = (0..family.tubes.len())
        .filter(|&i| tube_in_region(&family.tubes[i], &inst.y))
        .collect();
    let spacing = inst.big_r.sqrt() / 4.0;
    let lattice = SamplingLattice::ball(inst.d, inst.big_r, spacing, inst.big_r);
    let packets = decompose_wave_packets(&inst.omega, &inst.caps, &family, &lattice)?;
    let w_tubes: Vec<Tube> = w_ids.iter().map(|&i| family.tubes[i].clone()).collect();
    let incidence = incidence_count(&w_tubes, inst.big_r, inst.d)?;
    Ok(ExamplePackets {
        family,
        w_ids,
        packets,
        incidence,
    })
}

/// Full measurement of the instance at exponent `p`: coherence, norms of
/// both decoupling sides, incidence count, and the predicted ratio scaling.
pub fn example_report(inst: &ExampleInstance, p: f64) -> Result<ExperimentReport> {
    if p <= 0.0 {
        return Err(Error::Domain(alloc::format!("p = {p} must be positive")));
    }
    let mut rep = ExperimentReport::new();
    let norm_const = TAU.powf(-(inst.d as f64) / 2.0);
    rep.push("kappa", inst.kappa)?;
    rep.push("omega_lattice_count", inst.omega_lattice_count as f64)?;
    rep.push("omega_measure", inst.omega_measure)?;
    rep.push("lambda_lattice_count", inst.lambda_lattice_count as f64)?;
    rep.push("lambda_volume", inst.lambda_volume)?;
    rep.push("inflation", inst.inflation)?;
    rep.push("m_predicted", inst.m_predicted)?;
    rep.push("phase_deviation", phase_deviation(inst))?;

    // f on the Lambda sample: coherence and the weighted LHS norm
    let f_lambda = extend(&inst.omega, &inst.lambda)?;
    let coherent = norm_const * inst.omega_measure;
    let min_ratio = f_lambda
        .values
        .iter()
        .map(|v| v.norm() / coherent)
        .fold(f64::INFINITY, f64::min);
    rep.push("coherence_min_ratio", min_ratio)?;
    let lhs = weighted_lp_norm(&f_lambda, &Region::All, None, p)?;
    rep.push("lhs_norm", lhs)?;

    // packets on the ambient lattice: RHS norm over W, incidence M
    let ep = example_packets(inst)?;
    let m_measured = ep.incidence.max_count;
    rep.push("m_measured", m_measured as f64)?;
    rep.push("w_count", ep.w_ids.len() as f64)?;
    let wset: alloc::collections::BTreeSet<usize> = ep.w_ids.iter().copied().collect();
    let packet_pow = sum_f64(ep.packets.packets.iter().filter_map(|pk| {
        if wset.contains(&pk.tube_id) {
            Some(pk.lp_pow(&ep.packets.point_weights, p))
        } else {
            None
        }
    }));
    let m_eff = m_measured.max(1) as f64;
    let rhs = m_eff.powf(0.5 - 1.0 / p) * packet_pow.powf(1.0 / p);
    rep.push("rhs_norm", rhs)?;
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    rep.push("ratio", ratio)?;
    rep.push(
        "ratio_predicted_exponent",
        inst.kappa * ((inst.m as f64 - 1.0) / 2.0 - (inst.m as f64 + 1.0) / p),
    )?;

    // per-cap field magnitude on a Y lattice, in normalized units
    let spacing = inst.big_r.sqrt() / 4.0;
    let y_lattice = {
        let full = SamplingLattice::ball(inst.d, inst.big_r, spacing, inst.big_r);
        let mut pts = Vec::new();
        let mut ws = Vec::new();
        for i in 0..full.len() {
            if inst.y.contains(full.point(i)) {
                pts.extend_from_slice(full.point(i));
                ws.push(full.weights[i]);
            }
        }
        SamplingLattice {
            dim: inst.d,
            points: pts,
            weights: ws,
            scale: inst.big_r,
        }
    };
    let cell_norm = norm_const
        * unit_ball_volume(inst.d - inst.m)
        * unit_ball_volume(inst.m - 1)
        * inst.c.powi(inst.d as i32 - 1);
    let mut percap_min = f64::INFINITY;
    let mut percap_max = 0.0_f64;
    let mut percap_pow_sum = 0.0;
    for &cap in &inst.active_caps {
        let g_cap = inst.omega.restrict_to_cap(cap);
        let f_cap = extend(&g_cap, &y_lattice)?;
        let mean_mag = sum_f64(f_cap.values.iter().map(|v| v.norm())) / f_cap.len() as f64;
        // in these units the magnitude scales like R^{-(d-m)/2 - (m-1)}
        let normalized = mean_mag / cell_norm;
        percap_min = percap_min.min(normalized);
        percap_max = percap_max.max(normalized);
        percap_pow_sum += f_cap.lp_norm(p).powf(p);
    }
    rep.push("percap_mag_normalized_min", percap_min)?;
    rep.push("percap_mag_normalized_max", percap_max)?;
    rep.push("percap_lp_pow_sum_y", percap_pow_sum)?;
    Ok(rep)
}

/// The decoupling-meter route to the same ratio: LHS from the Lambda-sampled
/// field, RHS from the packet set, both through the meter's operations.
pub fn meter_ratio(inst: &ExampleInstance, ep: &ExamplePackets, p: f64) -> Result<f64> {
    let f_lambda = extend(&inst.omega, &inst.lambda)?;
    let lhs = weighted_lp_norm(&f_lambda, &Region::All, None, p)?;
    let case = DecouplingCase {
        variant: CaseVariant::B,
        d: inst.d,
        m: inst.m,
        p,
        alpha: Some(inst.alpha),
        r: None,
        big_r: inst.big_r,
    };
    // restrict the packet set to W before handing it to the meter
    let wset: alloc::collections::BTreeSet<usize> = ep.w_ids.iter().copied().collect();
    let mut restricted = ep.packets.clone();
    restricted.packets.retain(|pk| wset.contains(&pk.tube_id));
    let rep = decoupling_ratio(
        &restricted,
        &Region::Ball {
            radius: inst.big_r,
        },
        None,
        &case,
        ep.incidence.max_count,
    )?;
    let rhs = rep.get("rhs_norm").unwrap();
    Ok(if rhs > 0.0 { lhs / rhs } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_values() {
        assert!((kappa_from_alpha(3, 2, 2.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(kappa_from_alpha(3, 3, 3.0).unwrap(), 0.0);
        assert!((kappa_from_alpha(2, 2, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(
            kappa_from_alpha(2, 2, 0.4),
            Err(Error::OutOfRange(_))
        ));
        for alpha in [0.5, 0.75, 1.0, 1.5, 2.0] {
            assert!(kappa_from_alpha(2, 2, alpha).unwrap() <= 0.25);
        }
    }

    #[test]
    fn omega_counts_match_lattice_formula() {
        // kappa = 1/4: xi'' lattice count = 2*floor(R^kappa / 2pi) + 1
        for (r, expect) in [(256.0, 1), (2048.0, 3), (4096.0, 3)] {
            let inst = build_sharp_example(2, 2, 0.5, r, 0.001).unwrap();
            assert_eq!(inst.omega_lattice_count, expect, "R = {r}");
        }
    }

    #[test]
    fn omega_degenerates_to_single_ball_at_full_dimension() {
        // alpha = d: kappa = 0, lattice spacing 2 pi exceeds the ball
        let inst = build_sharp_example(2, 2, 2.0, 256.0, 0.001).unwrap();
        assert_eq!(inst.omega_lattice_count, 1);
        assert_eq!(inst.omega.len(), 3); // one cell, 3^{d-1} stencil
    }

    #[test]
    fn lambda_volume_matches_closed_form() {
        let inst = build_sharp_example(2, 2, 0.5, 512.0, 0.001).unwrap();
        let per = (2.0 * inst.c) * (2.0 * inst.c);
        assert!(
            (inst.lambda_volume - per * inst.lambda_lattice_count as f64).abs()
                < 1e-12 * inst.lambda_volume
        );
        // against the scaling form R^{(d+m)/2 - kappa(m+1)}: the constant is
        // ~ 8 pi c^2 up to lattice clipping (factor-8 check)
        let formula = inst.big_r.powf((2.0 + 2.0) / 2.0 - inst.kappa * 3.0);
        let constant = inst.lambda_volume / formula;
        let expect = 8.0 * core::f64::consts::PI * inst.c * inst.c;
        assert!(
            constant > expect / 8.0 && constant < expect * 8.0,
            "constant {constant} vs {expect}"
        );
    }

    #[test]
    fn phase_deviation_small_and_perturbation_large() {
        // alpha = 0.5 so the xi'' lattice has nonzero nodes (the negative
        // control needs |xi''|^2 of order one)
        let inst = build_sharp_example(2, 2, 0.5, 2048.0, 0.001).unwrap();
        assert!(inst.omega_lattice_count >= 3);
        let dev = phase_deviation(&inst);
        assert!(dev < 0.01 + 3.0 * inst.c, "phase deviation {dev} too large");
        // half-lattice x_d perturbation is a negative control: the phase of
        // the q = +-1 nodes moves by about pi
        let mut pts = inst.lambda_phase_sample(500);
        for x in pts.iter_mut() {
            let last = x.len() - 1;
            x[last] += inst.xd_spacing / 2.0;
        }
        let dev2 = max_phase_deviation(&inst.omega, &pts);
        assert!(dev2 > 0.01, "perturbed deviation {dev2} not detected");
    }

    #[test]
    fn zero_frequency_node_contributes_zero_phase() {
        let inst = build_sharp_example(2, 2, 2.0, 256.0, 0.001).unwrap();
        let zero_node = (0..inst.omega.len())
            .find(|&j| inst.omega.node(j).iter().all(|&v| v == 0.0))
            .unwrap();
        let sub = FrequencySet {
            freq_dim: 1,
            nodes: inst.omega.node(zero_node).to_vec(),
            weights: alloc::vec![1.0],
            values: alloc::vec![Complex64::new(1.0, 0.0)],
            cap_of: alloc::vec![0],
        };
        let dev = max_phase_deviation(&sub, &inst.lambda_phase_sample(200));
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn deterministic_rebuild_is_bit_identical() {
        let a = build_sharp_example(2, 2, 1.5, 512.0, 0.001).unwrap();
        let b = build_sharp_example(2, 2, 1.5, 512.0, 0.001).unwrap();
        assert_eq!(a.omega.nodes, b.omega.nodes);
        assert_eq!(a.lambda.points, b.lambda.points);
        assert_eq!(a.lambda.weights, b.lambda.weights);
    }

    #[test]
    fn coherence_on_lambda() {
        let inst = build_sharp_example(2, 2, 1.0, 512.0, 0.001).unwrap();
        let f = extend(&inst.omega, &inst.lambda).unwrap();
        let coherent = (2.0 * core::f64::consts::PI).powf(-1.0) * inst.omega_measure;
        for v in &f.values {
            assert!(v.norm() >= 0.9 * coherent);
        }
    }

    #[test]
    fn subsampling_respects_budget_and_errors_when_disallowed() {
        let opts = BuildOptions {
            budget: 1000,
            allow_subsample: true,
        };
        let inst = build_sharp_example_with(2, 2, 0.5, 4096.0, 0.001, opts).unwrap();
        assert!(inst.lambda.len() <= 1100);
        assert!(inst.inflation > 1.0);
        // volume bookkeeping survives subsampling
        let sampled_vol = sum_f64(inst.lambda.weights.iter().copied());
        assert!(
            (sampled_vol - inst.lambda_volume).abs() < 0.05 * inst.lambda_volume,
            "sampled {sampled_vol} vs {}",
            inst.lambda_volume
        );
        let strict = BuildOptions {
            budget: 1000,
            allow_subsample: false,
        };
        assert!(matches!(
            build_sharp_example_with(2, 2, 0.5, 4096.0, 0.001, strict),
            Err(Error::Budget(_))
        ));
    }
}
