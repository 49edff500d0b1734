//! Fourier extension over the truncated paraboloid by direct quadrature,
//! and the spatial wave-packet decomposition subordinate to a tube family.
//!
//! Everything is evaluated on explicit point sets with quadrature weights.
//! Sums run in a fixed order with compensated accumulation, so repeated
//! evaluations are bit-identical and parallel drivers that split over
//! points reproduce the serial result exactly.

use crate::geometry::{Cap, Tube, TubeFamily};
use crate::sums::{sum_f64, ComplexSum};
use crate::{bump, Error, Result};
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Quadrature nodes with complex amplitudes in the frequency ball
/// `B^{d-1}(0,1)`, each labelled with its owning cap.
#[derive(Clone, Debug)]
pub struct FrequencySet {
    /// frequency dimension `d - 1`
    pub freq_dim: usize,
    /// flat node coordinates, one `freq_dim` chunk per node
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<Complex64>,
    pub cap_of: Vec<usize>,
}

impl FrequencySet {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.freq_dim..(i + 1) * self.freq_dim]
    }

    /// Total quadrature mass `sum w_i |g_i|`.
    pub fn weighted_l1(&self) -> f64 {
        sum_f64(
            self.weights
                .iter()
                .zip(&self.values)
                .map(|(w, v)| w * v.norm()),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if self.nodes.len() != n * self.freq_dim
            || self.values.len() != n
            || self.cap_of.len() != n
        {
            return Err(Error::Domain("frequency set length mismatch".to_string()));
        }
        for i in 0..n {
            let r2 = sum_f64(self.node(i).iter().map(|x| x * x));
            if r2 > 1.0 + 1e-9 {
                return Err(Error::Domain(alloc::format!(
                    "node {i} outside the closed unit ball (|xi|^2 = {r2})"
                )));
            }
            if self.weights[i] <= 0.0 {
                return Err(Error::Domain(alloc::format!("weight {i} not positive")));
            }
        }
        Ok(())
    }

    /// Restriction to the nodes of one cap.
    pub fn restrict_to_cap(&self, cap: usize) -> FrequencySet {
        let mut out = FrequencySet {
            freq_dim: self.freq_dim,
            nodes: Vec::new(),
            weights: Vec::new(),
            values: Vec::new(),
            cap_of: Vec::new(),
        };
        for i in 0..self.len() {
            if self.cap_of[i] == cap {
                out.nodes.extend_from_slice(self.node(i));
                out.weights.push(self.weights[i]);
                out.values.push(self.values[i]);
                out.cap_of.push(cap);
            }
        }
        out
    }

    /// Caps that carry at least one node with a nonzero amplitude.
    pub fn active_caps(&self) -> Vec<usize> {
        let mut caps: Vec<usize> = self
            .cap_of
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| v.norm_sqr() > 0.0)
            .map(|(c, _)| *c)
            .collect();
        caps.sort_unstable();
        caps.dedup();
        caps
    }
}

/// Assigns each node of a bare node list to its cap by lattice position.
pub fn label_caps(caps: &[Cap], freq_dim: usize, nodes: &[f64]) -> Vec<usize> {
    let n = nodes.len() / freq_dim;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let xi = &nodes[i * freq_dim..(i + 1) * freq_dim];
        let hit = caps
            .iter()
            .position(|c| {
                (0..freq_dim).all(|k| xi[k] >= c.lower(k) - 1e-15 && xi[k] < c.upper(k) + 1e-15)
            })
            .unwrap_or(usize::MAX);
        out.push(hit);
    }
    out
}

/// A spatial point set with quadrature weights.
#[derive(Clone, Debug)]
pub struct SamplingLattice {
    pub dim: usize,
    /// flat coordinates, one `dim` chunk per point
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// ambient scale `R` of the experiment the lattice belongs to
    pub scale: f64,
}

impl SamplingLattice {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Lattice of spacing `h` covering the ball of radius `rho`, weights
    /// `h^d`. Enumeration order is a fixed odometer over the index box.
    pub fn ball(dim: usize, rho: f64, h: f64, scale: f64) -> SamplingLattice {
        let kmax = (rho / h).ceil() as i64;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let w = h.powi(dim as i32);
        let mut idx = vec![-kmax; dim];
        'outer: loop {
            let p: Vec<f64> = idx.iter().map(|&k| k as f64 * h).collect();
            if sum_f64(p.iter().map(|x| x * x)).sqrt() <= rho {
                points.extend_from_slice(&p);
                weights.push(w);
            }
            let mut i = 0;
            loop {
                if i == dim {
                    break 'outer;
                }
                idx[i] += 1;
                if idx[i] <= kmax {
                    break;
                }
                idx[i] = -kmax;
                i += 1;
            }
        }
        SamplingLattice {
            dim,
            points,
            weights,
            scale,
        }
    }

    /// Points from an explicit list with uniform weight.
    pub fn cloud(dim: usize, points: Vec<f64>, weight_each: f64, scale: f64) -> SamplingLattice {
        let n = points.len() / dim;
        SamplingLattice {
            dim,
            points,
            weights: vec![weight_each; n],
            scale,
        }
    }
}

/// Complex field values on a sampling lattice.
#[derive(Clone, Debug)]
pub struct SampledField {
    pub dim: usize,
    pub points: Vec<f64>,
    pub values: Vec<Complex64>,
    pub point_weights: Vec<f64>,
    pub scale: f64,
}

impl SampledField {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Weighted squared L2 norm.
    pub fn l2_sq(&self) -> f64 {
        sum_f64(
            self.values
                .iter()
                .zip(&self.point_weights)
                .map(|(v, w)| w * v.norm_sqr()),
        )
    }

    /// Weighted Lp norm over all points.
    pub fn lp_norm(&self, p: f64) -> f64 {
        sum_f64(
            self.values
                .iter()
                .zip(&self.point_weights)
                .map(|(v, w)| w * v.norm().powf(p)),
        )
        .powf(1.0 / p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Phase `x' . xi' + x'' . xi'' + x_d |xi|^2` of the extension kernel.
#[inline]
fn extension_phase(x: &[f64], xi: &[f64]) -> f64 {
    let d = x.len();
    let mut head = 0.0;
    let mut xi2 = 0.0;
    for k in 0..d - 1 {
        head += x[k] * xi[k];
        xi2 += xi[k] * xi[k];
    }
    head + x[d - 1] * xi2
}

/// Evaluates the Fourier extension `Eg` of `g` on a point set:
/// `(2 pi)^{-d/2} sum_j w_j g_j exp(i phase(x, xi_j))`, nodes in index
/// order with compensated accumulation.
pub fn extend(g: &FrequencySet, lattice: &SamplingLattice) -> Result<SampledField> {
    g.validate()?;
    if lattice.is_empty() {
        return Err(Error::EmptyInput("no evaluation points".to_string()));
    }
    let d = lattice.dim;
    if g.freq_dim + 1 != d {
        return Err(Error::ScaleMismatch(alloc::format!(
            "frequency dim {} incompatible with ambient dim {d}",
            g.freq_dim
        )));
    }
    let norm_const = (2.0 * core::f64::consts::PI).powf(-(d as f64) / 2.0);
    let mut values = Vec::with_capacity(lattice.len());
    for i in 0..lattice.len() {
        let x = lattice.point(i);
        let mut acc = ComplexSum::new();
        for j in 0..g.len() {
            let phase = extension_phase(x, g.node(j));
            let (s, c) = phase.sin_cos();
            acc.add(g.values[j] * g.weights[j] * Complex64::new(c, s));
        }
        values.push(acc.value() * norm_const);
    }
    Ok(SampledField {
        dim: d,
        points: lattice.points.clone(),
        values,
        point_weights: lattice.weights.clone(),
        scale: lattice.scale,
    })
}

/// One wave packet: sparse values of `eta_T f_theta` on the shared lattice.
#[derive(Clone, Debug)]
pub struct WavePacket {
    pub tube: Tube,
    /// id of the tube inside the family the decomposition was built from
    pub tube_id: usize,
    pub indices: Vec<u32>,
    pub values: Vec<Complex64>,
}

impl WavePacket {
    pub fn l2_sq(&self, weights: &[f64]) -> f64 {
        sum_f64(
            self.indices
                .iter()
                .zip(&self.values)
                .map(|(&i, v)| weights[i as usize] * v.norm_sqr()),
        )
    }

    pub fn lp_pow(&self, weights: &[f64], p: f64) -> f64 {
        sum_f64(
            self.indices
                .iter()
                .zip(&self.values)
                .map(|(&i, v)| weights[i as usize] * v.norm().powf(p)),
        )
    }
}

/// A decomposition `f = sum_T f_T + residual` on a shared lattice.
#[derive(Clone, Debug)]
pub struct WavePacketSet {
    pub dim: usize,
    pub points: Vec<f64>,
    pub point_weights: Vec<f64>,
    pub scale: f64,
    pub packets: Vec<WavePacket>,
    /// parent minus the packet sum: the low-frequency part plus tails
    pub residual: Vec<Complex64>,
    pub parent: Vec<Complex64>,
}

impl WavePacketSet {
    pub fn len_points(&self) -> usize {
        self.point_weights.len()
    }

    /// Dense sum of all packets.
    pub fn packet_sum(&self) -> Vec<Complex64> {
        let mut sum = vec![Complex64::new(0.0, 0.0); self.len_points()];
        for p in &self.packets {
            for (&i, v) in p.indices.iter().zip(&p.values) {
                sum[i as usize] += v;
            }
        }
        sum
    }

    /// The packet sum as a field on the shared lattice.
    pub fn sum_field(&self) -> SampledField {
        SampledField {
            dim: self.dim,
            points: self.points.clone(),
            values: self.packet_sum(),
            point_weights: self.point_weights.clone(),
            scale: self.scale,
        }
    }

    /// Relative L2 distance between the parent and the packet sum; the
    /// residual (low frequencies and tails) is what is left over.
    pub fn residual_rel_l2(&self) -> f64 {
        let sum = self.packet_sum();
        let num = sum_f64(
            self.parent
                .iter()
                .zip(&sum)
                .zip(&self.point_weights)
                .map(|((a, b), w)| w * (a - b).norm_sqr()),
        );
        let den = sum_f64(
            self.parent
                .iter()
                .zip(&self.point_weights)
                .map(|(a, w)| w * a.norm_sqr()),
        );
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }

    /// Exact reconstruction defect `parent - (packets + residual)`; zero by
    /// construction up to the floating sum order.
    pub fn reconstruction_rel_l2(&self) -> f64 {
        let sum = self.packet_sum();
        let num = sum_f64(self.parent.iter().enumerate().map(|(i, a)| {
            let r = a - sum[i] - self.residual[i];
            self.point_weights[i] * r.norm_sqr()
        }));
        let den = sum_f64(
            self.parent
                .iter()
                .zip(&self.point_weights)
                .map(|(a, w)| w * a.norm_sqr()),
        );
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }

    /// Largest over packets of the L2-mass fraction outside the doubled
    /// tube. Zero-mass packets count as zero.
    pub fn max_mass_outside_2t(&self) -> f64 {
        let mut worst = 0.0;
        for p in &self.packets {
            let total = p.l2_sq(&self.point_weights);
            if total <= 0.0 {
                continue;
            }
            let outside = sum_f64(p.indices.iter().zip(&p.values).filter_map(|(&i, v)| {
                let x = &self.points[i as usize * self.dim..(i as usize + 1) * self.dim];
                if p.tube.contains(x, 2.0) {
                    None
                } else {
                    Some(self.point_weights[i as usize] * v.norm_sqr())
                }
            }));
            worst = f64::max(worst, outside / total);
        }
        worst
    }
}

/// Smooth partition weights of one tube group at a point: bump products
/// over the cross-section lattice and the axial lattice, normalized over
/// the group members present. Returns `(member_position, weight)` pairs.
pub(crate) fn partition_weights(
    family: &TubeFamily,
    group_idx: usize,
    x: &[f64],
) -> Vec<(usize, f64)> {
    let g = &family.groups[group_idx];
    let d = x.len();
    let mut cross = Vec::with_capacity(d - 1);
    for b in &g.cross_basis {
        cross.push(sum_f64((0..d).map(|i| b[i] * x[i])));
    }
    let axial = sum_f64((0..d).map(|i| g.direction[i] * x[i]));
    let mut hits: Vec<(usize, f64)> = Vec::new();
    let mut total = 0.0;
    for (kvec, a, id) in &g.members {
        let mut v = bump((axial - *a as f64 * g.axial_spacing) / g.axial_spacing);
        if v == 0.0 {
            continue;
        }
        for (ci, &k) in kvec.iter().enumerate() {
            v *= bump((cross[ci] - k as f64 * g.cross_spacing) / g.cross_spacing);
            if v == 0.0 {
                break;
            }
        }
        if v > 0.0 {
            total += v;
            hits.push((*id, v));
        }
    }
    if total > 0.0 {
        for h in hits.iter_mut() {
            h.1 /= total;
        }
    }
    hits
}

/// Wave-packet decomposition of `extend(g)`: for each cap, the cap-restricted
/// extension is multiplied by the smooth spatial partition subordinate to the
/// cap's tube group. Caps with active nodes must be present in the family.
pub fn decompose_wave_packets(
    g: &FrequencySet,
    caps: &[Cap],
    family: &TubeFamily,
    lattice: &SamplingLattice,
) -> Result<WavePacketSet> {
    let parent = extend(g, lattice)?;
    let active = g.active_caps();
    for &cap in &active {
        if cap >= caps.len() {
            return Err(Error::Domain(alloc::format!("cap index {cap} out of range")));
        }
        if !family
            .groups
            .iter()
            .any(|grp| grp.cap_index == Some(cap))
        {
            return Err(Error::IncompleteCover(alloc::format!(
                "no tube group for active cap {cap}"
            )));
        }
    }
    let mut packets: Vec<WavePacket> = Vec::new();
    for (gi, grp) in family.groups.iter().enumerate() {
        let cap = match grp.cap_index {
            Some(c) if active.contains(&c) => c,
            _ => continue,
        };
        let g_cap = g.restrict_to_cap(cap);
        let f_cap = extend(&g_cap, lattice)?;
        let mut by_tube: alloc::collections::BTreeMap<usize, (Vec<u32>, Vec<Complex64>)> =
            alloc::collections::BTreeMap::new();
        for i in 0..lattice.len() {
            let x = lattice.point(i);
            for (tube_id, eta) in partition_weights(family, gi, x) {
                let entry = by_tube.entry(tube_id).or_default();
                entry.0.push(i as u32);
                entry.1.push(f_cap.values[i] * eta);
            }
        }
        for (tube_id, (indices, values)) in by_tube {
            packets.push(WavePacket {
                tube: family.tubes[tube_id].clone(),
                tube_id,
                indices,
                values,
            });
        }
    }
    let mut residual = parent.values.clone();
    for p in &packets {
        for (&i, v) in p.indices.iter().zip(&p.values) {
            residual[i as usize] -= v;
        }
    }
    Ok(WavePacketSet {
        dim: lattice.dim,
        points: lattice.points.clone(),
        point_weights: lattice.weights.clone(),
        scale: lattice.scale,
        packets,
        residual,
        parent: parent.values,
    })
}

/// Frequency-cap center implied by a tube direction: inverts the paraboloid
/// normal map `xi -> (-2 xi, 1)/|.|`.
fn cap_center_of_direction(dir: &[f64]) -> Result<Vec<f64>> {
    let d = dir.len();
    let last = dir[d - 1];
    if last.abs() < 0.05 {
        return Err(Error::Domain(
            "tube direction too far from any paraboloid normal".to_string(),
        ));
    }
    Ok(dir[..d - 1].iter().map(|&v| -v / (2.0 * last)).collect())
}

/// Builds one random wave packet per selected tube: a smooth profile
/// supported in the tube times the plane wave of the owning cap, with a
/// seeded uniform random phase, each normalized to unit weighted L2 mass.
/// Returns the summed field together with the packet set.
pub fn random_packet_field(
    family: &TubeFamily,
    tube_ids: &[usize],
    seed: u64,
    lattice: &SamplingLattice,
) -> Result<(SampledField, WavePacketSet)> {
    use rand::{Rng, SeedableRng};
    if tube_ids.is_empty() {
        return Err(Error::EmptyInput("empty tube subset".to_string()));
    }
    let d = lattice.dim;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut packets: Vec<WavePacket> = Vec::new();
    for &tid in tube_ids {
        let tube = family
            .tubes
            .get(tid)
            .ok_or_else(|| Error::Domain(alloc::format!("tube id {tid} out of range")))?
            .clone();
        let phase0: f64 = rng.random::<f64>() * 2.0 * core::f64::consts::PI;
        let xi_c = cap_center_of_direction(&tube.direction)?;
        let cross = crate::linalg::complete_basis(
            core::slice::from_ref(&tube.direction),
            d,
        );
        let half_len = tube.length / 2.0;
        let rad2 = 2.0 * tube.radius * 0.999;
        // bounding box prefilter
        let (e0, e1) = tube.endpoints();
        let mut lo = vec![0.0; d];
        let mut hi = vec![0.0; d];
        for i in 0..d {
            lo[i] = e0[i].min(e1[i]) - rad2;
            hi[i] = e0[i].max(e1[i]) + rad2;
        }
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..lattice.len() {
            let x = lattice.point(i);
            if (0..d).any(|k| x[k] < lo[k] || x[k] > hi[k]) {
                continue;
            }
            let axial = sum_f64((0..d).map(|k| (x[k] - tube.axis_point[k]) * tube.direction[k]));
            let mut prof = bump(axial / (half_len * 0.999));
            if prof == 0.0 {
                continue;
            }
            let mut r2 = 0.0;
            for b in &cross[1..] {
                let c = sum_f64((0..d).map(|k| (x[k] - tube.axis_point[k]) * b[k]));
                r2 += c * c;
            }
            prof *= bump(r2.sqrt() / rad2);
            if prof == 0.0 {
                continue;
            }
            let phase = extension_phase(x, &xi_c) + phase0;
            let (s, c) = phase.sin_cos();
            indices.push(i as u32);
            values.push(Complex64::new(c, s) * prof);
        }
        let mass = sum_f64(
            indices
                .iter()
                .zip(&values)
                .map(|(&i, v)| lattice.weights[i as usize] * v.norm_sqr()),
        );
        if mass <= 0.0 {
            return Err(Error::Domain(alloc::format!(
                "tube {tid} has no support on the lattice"
            )));
        }
        let inv = mass.sqrt().recip();
        for v in values.iter_mut() {
            *v *= inv;
        }
        packets.push(WavePacket {
            tube,
            tube_id: tid,
            indices,
            values,
        });
    }
    let mut sum = vec![Complex64::new(0.0, 0.0); lattice.len()];
    for p in &packets {
        for (&i, v) in p.indices.iter().zip(&p.values) {
            sum[i as usize] += v;
        }
    }
    let field = SampledField {
        dim: d,
        points: lattice.points.clone(),
        values: sum.clone(),
        point_weights: lattice.weights.clone(),
        scale: lattice.scale,
    };
    let set = WavePacketSet {
        dim: d,
        points: lattice.points.clone(),
        point_weights: lattice.weights.clone(),
        scale: lattice.scale,
        packets,
        residual: vec![Complex64::new(0.0, 0.0); lattice.len()],
        parent: sum,
    };
    Ok((field, set))
}
