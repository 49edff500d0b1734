//! Geometric objects of the lab: caps on the truncated paraboloid, dual
//! tubes, plates (neighborhoods of affine planes), plate nets, and
//! direction-concentration fits.
//!
//! Conventions used throughout:
//! - Frequency space is `R^{d-1}`; caps are axis-aligned lattice cells of
//!   exact spacing `R^{-1/2}` indexed by integer tuples, so tiling facts are
//!   deterministic.
//! - `n`-fold tube dilation scales the radius only, never the length.
//! - Plate membership `dist(z, plane) < thickness` is strict; plate-in-plate
//!   covering is tested on central-plane samples inside the unit ball (the
//!   fringe of the inner plate may poke out). Tube-in-plate containment is a
//!   full boundary test and is strict as well.

use crate::linalg::{
    complete_basis, dot, gram_schmidt, jacobi_eigh, norm, normalize,
    sin_angle_to_subspace, sin_max_principal_angle,
};
use crate::sphere::{covering_net, line_net};
use crate::sums::sum_f64;
use crate::{Error, Result};
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Fraction of a plate's thickness allotted to the orientation net and to
/// the translation net of [`build_plate_net`]; their sum must stay below 1
/// for the covering property to hold on central-plane samples.
const NET_ANGLE_FRAC: f64 = 0.47;
const NET_OFFSET_FRAC: f64 = 0.47;

/// Tube scale regimes: dual tubes in the ball of radius `R`, or rescaled
/// tubes in the unit ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScaleMode {
    /// radius `R^{1/2+beta}`, length `R`, family covers `B(0, R)`
    ScaleR,
    /// radius `R^{-1/2+beta}`, length `2`, family covers `B(0, 2)`
    UnitBall,
}

/// Unit surface normal of the paraboloid graph `xi -> |xi|^2` at `xi`,
/// oriented with positive last coordinate.
pub fn paraboloid_normal(xi: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = xi.iter().map(|&x| -2.0 * x).collect();
    v.push(1.0);
    normalize(&v).expect("normal is never degenerate")
}

/// A lattice cell of the cap partition at scale `R^{-1/2}`.
#[derive(Clone, Debug)]
pub struct Cap {
    /// cell midpoint in `R^{d-1}` (may fall slightly outside `[-1,1]^{d-1}`
    /// for edge cells when `2 sqrt(R)` is not an integer)
    pub center: Vec<f64>,
    /// side length `R^{-1/2}`
    pub scale: f64,
    /// paraboloid normal at `center`, in `R^d`
    pub normal: Vec<f64>,
    /// lattice coordinates of the cell
    pub index: Vec<i64>,
}

impl Cap {
    /// Ambient dimension `d` (frequency dimension plus one).
    pub fn ambient_dim(&self) -> usize {
        self.center.len() + 1
    }

    pub fn lower(&self, i: usize) -> f64 {
        self.index[i] as f64 * self.scale
    }

    pub fn upper(&self, i: usize) -> f64 {
        (self.index[i] + 1) as f64 * self.scale
    }

    /// Volume of the cell clipped to `[-1,1]^{d-1}`; edge cells count only
    /// their inside part so the clipped areas tile the cube exactly.
    pub fn clipped_area(&self) -> f64 {
        let mut a = 1.0;
        for i in 0..self.center.len() {
            let lo = self.lower(i).max(-1.0);
            let hi = self.upper(i).min(1.0);
            a *= (hi - lo).max(0.0);
        }
        a
    }

    /// Whether a frequency point lies in the cell dilated about its center.
    pub fn contains_freq(&self, xi: &[f64], dilation: f64) -> bool {
        debug_assert_eq!(xi.len(), self.center.len());
        let half = dilation * self.scale / 2.0;
        xi.iter()
            .zip(&self.center)
            .all(|(x, c)| (x - c).abs() <= half)
    }
}

/// Partitions `[-1,1]^{d-1}` into caps of side `R^{-1/2}` on the integer
/// lattice, each carrying its paraboloid normal.
pub fn build_caps(big_r: f64, d: usize) -> Result<Vec<Cap>> {
    if big_r < 4.0 {
        return Err(Error::InvalidScale(alloc::format!(
            "cap scale R = {big_r} must be >= 4"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidDimension("caps need d >= 2".to_string()));
    }
    let s = big_r.powf(-0.5);
    let kmax = (1.0 / s - 1e-12).ceil() as i64;
    let per_axis = 2 * kmax;
    let n = d - 1;
    let total = (per_axis as usize).pow(n as u32);
    let mut caps = Vec::with_capacity(total);
    let mut idx = vec![-kmax; n];
    loop {
        let center: Vec<f64> = idx.iter().map(|&k| (k as f64 + 0.5) * s).collect();
        caps.push(Cap {
            normal: paraboloid_normal(&center),
            center,
            scale: s,
            index: idx.clone(),
        });
        // odometer over the index ranges
        let mut i = 0;
        loop {
            if i == n {
                return Ok(caps);
            }
            idx[i] += 1;
            if idx[i] < kmax {
                break;
            }
            idx[i] = -kmax;
            i += 1;
        }
    }
}

/// A tube: neighborhood of an axis segment, oriented along `direction`.
#[derive(Clone, Debug)]
pub struct Tube {
    /// midpoint of the axis segment
    pub axis_point: Vec<f64>,
    /// unit direction of the long axis
    pub direction: Vec<f64>,
    pub radius: f64,
    pub length: f64,
    /// owning cap for paraboloid families, `None` for bare direction nets
    pub cap_index: Option<usize>,
    pub mode: ScaleMode,
}

impl Tube {
    pub fn dim(&self) -> usize {
        self.axis_point.len()
    }

    /// Signed coordinate along the axis, measured from the midpoint.
    pub fn axial_coord(&self, x: &[f64]) -> f64 {
        sum_f64(
            x.iter()
                .zip(&self.axis_point)
                .zip(&self.direction)
                .map(|((x, c), u)| (x - c) * u),
        )
    }

    /// Distance from `x` to the axis line.
    pub fn radial_dist(&self, x: &[f64]) -> f64 {
        let t = self.axial_coord(x);
        let mut s = 0.0;
        for i in 0..x.len() {
            let r = x[i] - self.axis_point[i] - t * self.direction[i];
            s += r * r;
        }
        s.sqrt()
    }

    /// Closed membership in the tube with its radius dilated by `factor`
    /// (the length is never dilated).
    pub fn contains(&self, x: &[f64], factor: f64) -> bool {
        self.axial_coord(x).abs() <= self.length / 2.0 && self.radial_dist(x) <= factor * self.radius
    }

    /// The two axis endpoints.
    pub fn endpoints(&self) -> (Vec<f64>, Vec<f64>) {
        let h = self.length / 2.0;
        let a = self
            .axis_point
            .iter()
            .zip(&self.direction)
            .map(|(c, u)| c - h * u)
            .collect();
        let b = self
            .axis_point
            .iter()
            .zip(&self.direction)
            .map(|(c, u)| c + h * u)
            .collect();
        (a, b)
    }
}

/// Per-direction lattice data of a tube family; retained so that the smooth
/// spatial partition subordinate to the covering can be evaluated later.
#[derive(Clone, Debug)]
pub struct TubeGroup {
    pub cap_index: Option<usize>,
    pub direction: Vec<f64>,
    /// orthonormal basis of the cross-section hyperplane
    pub cross_basis: Vec<Vec<f64>>,
    pub cross_spacing: f64,
    pub axial_spacing: f64,
    pub radius: f64,
    pub length: f64,
    /// (cross lattice index, axial index) -> position in `TubeFamily::tubes`
    pub members: Vec<(Vec<i64>, i64, usize)>,
}

/// A finitely overlapping family of parallel-by-group tubes covering a ball.
#[derive(Clone, Debug)]
pub struct TubeFamily {
    pub tubes: Vec<Tube>,
    pub groups: Vec<TubeGroup>,
    pub mode: ScaleMode,
    pub big_r: f64,
    pub beta: f64,
    pub cover_radius: f64,
}

impl TubeFamily {
    /// Group that a tube belongs to (groups partition tube indices).
    pub fn group_of(&self, tube_id: usize) -> usize {
        self.groups
            .iter()
            .position(|g| g.members.iter().any(|(_, _, id)| *id == tube_id))
            .expect("tube belongs to a group")
    }
}

fn tube_dims(big_r: f64, beta: f64, mode: ScaleMode) -> (f64, f64, f64) {
    match mode {
        ScaleMode::ScaleR => (big_r.powf(0.5 + beta), big_r, big_r),
        ScaleMode::UnitBall => (big_r.powf(-0.5 + beta), 2.0, 2.0),
    }
}

/// Builds the tube lattice for one direction: cross-section offsets on a
/// lattice of spacing `2 radius / sqrt(d-1)` (covering radius = `radius`)
/// and axis segments at spacing `length/2`.
fn build_group(
    direction: &[f64],
    radius: f64,
    length: f64,
    cover_radius: f64,
    cap_index: Option<usize>,
    mode: ScaleMode,
    tubes: &mut Vec<Tube>,
) -> TubeGroup {
    let d = direction.len();
    let cross_basis = {
        let full = complete_basis(&[direction.to_vec()], d);
        full[1..].to_vec()
    };
    let w = if d >= 3 {
        2.0 * radius / ((d - 1) as f64).sqrt()
    } else {
        2.0 * radius
    };
    let ax = length / 2.0;
    let kmax = ((cover_radius + radius) / w).ceil() as i64;
    // smallest symmetric range of axis segments whose union covers
    // [-cover_radius, cover_radius]
    let amax = (((cover_radius - length / 2.0).max(0.0)) / ax).ceil() as i64;
    let mut members = Vec::new();
    let mut idx = vec![-kmax; d - 1];
    loop {
        let offset: Vec<f64> = (0..d)
            .map(|i| {
                sum_f64(
                    idx.iter()
                        .zip(&cross_basis)
                        .map(|(&k, b)| k as f64 * w * b[i]),
                )
            })
            .collect();
        if norm(&offset) <= cover_radius + radius {
            for a in -amax..=amax {
                let center: Vec<f64> = (0..d)
                    .map(|i| offset[i] + a as f64 * ax * direction[i])
                    .collect();
                members.push((idx.clone(), a, tubes.len()));
                tubes.push(Tube {
                    axis_point: center,
                    direction: direction.to_vec(),
                    radius,
                    length,
                    cap_index,
                    mode,
                });
            }
        }
        let mut i = 0;
        loop {
            if i == d - 1 {
                return TubeGroup {
                    cap_index,
                    direction: direction.to_vec(),
                    cross_basis,
                    cross_spacing: w,
                    axial_spacing: ax,
                    radius,
                    length,
                    members,
                };
            }
            idx[i] += 1;
            if idx[i] <= kmax {
                break;
            }
            idx[i] = -kmax;
            i += 1;
        }
    }
}

/// Tubes dual to one cap: lattice translates perpendicular to the cap
/// normal, covering `B(0,R)` (`ScaleR`) or `B(0,2)` (`UnitBall`).
pub fn build_tubes(cap: &Cap, big_r: f64, beta: f64, mode: ScaleMode) -> Result<Vec<Tube>> {
    let family = build_tube_family_for_caps(core::slice::from_ref(cap), big_r, beta, mode)?;
    Ok(family.tubes)
}

/// Tube families for a set of caps, with partition metadata retained.
pub fn build_tube_family_for_caps(
    caps: &[Cap],
    big_r: f64,
    beta: f64,
    mode: ScaleMode,
) -> Result<TubeFamily> {
    if !(0.0..=0.1).contains(&beta) {
        return Err(Error::InvalidScale(alloc::format!(
            "beta = {beta} outside [0, 0.1]"
        )));
    }
    if big_r < 4.0 {
        return Err(Error::InvalidScale(alloc::format!(
            "tube scale R = {big_r} must be >= 4"
        )));
    }
    let (radius, length, cover) = tube_dims(big_r, beta, mode);
    let mut tubes = Vec::new();
    let mut groups = Vec::new();
    for (ci, cap) in caps.iter().enumerate() {
        let cap_index = if caps.len() == 1 {
            cap.index.first().map(|_| ci)
        } else {
            Some(ci)
        };
        groups.push(build_group(
            &cap.normal,
            radius,
            length,
            cover,
            cap_index,
            mode,
            &mut tubes,
        ));
    }
    Ok(TubeFamily {
        tubes,
        groups,
        mode,
        big_r,
        beta,
        cover_radius: cover,
    })
}

/// Tube family for an explicit direction net (used by the pinned-distance
/// machinery, whose directions range over the whole sphere rather than over
/// paraboloid normals). `cover_radius` is the radius of the ball the family
/// must cover.
pub fn build_tube_family_for_directions(
    directions: &[Vec<f64>],
    radius: f64,
    length: f64,
    cover_radius: f64,
    big_r: f64,
    beta: f64,
) -> Result<TubeFamily> {
    if directions.is_empty() {
        return Err(Error::EmptyInput("direction net".to_string()));
    }
    let mut tubes = Vec::new();
    let mut groups = Vec::new();
    for dir in directions {
        groups.push(build_group(
            dir,
            radius,
            length,
            cover_radius,
            None,
            ScaleMode::UnitBall,
            &mut tubes,
        ));
    }
    Ok(TubeFamily {
        tubes,
        groups,
        mode: ScaleMode::UnitBall,
        big_r,
        beta,
        cover_radius,
    })
}

/// Direction net over the full sphere at angular resolution `res`.
pub fn build_direction_net(d: usize, res: f64) -> Vec<Vec<f64>> {
    covering_net(d, res)
}

/// The `r`-neighborhood of an `m`-dimensional affine plane.
#[derive(Clone, Debug)]
pub struct Plate {
    /// point of the central plane closest to the origin
    pub anchor: Vec<f64>,
    /// orthonormal basis of the plane directions (length `m`)
    pub basis: Vec<Vec<f64>>,
    pub thickness: f64,
}

impl Plate {
    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn plane_dim(&self) -> usize {
        self.basis.len()
    }

    /// Distance from `z` to the central plane. The basis is orthonormal,
    /// so the rejection norm is computed without allocating:
    /// `|v|^2 - sum_i (b_i . v)^2`.
    pub fn plane_dist(&self, z: &[f64]) -> f64 {
        if self.basis.len() == self.anchor.len() {
            return 0.0;
        }
        let mut v2 = 0.0;
        for i in 0..z.len() {
            let v = z[i] - self.anchor[i];
            v2 += v * v;
        }
        let mut proj2 = 0.0;
        for b in &self.basis {
            let mut c = 0.0;
            for i in 0..z.len() {
                c += b[i] * (z[i] - self.anchor[i]);
            }
            proj2 += c * c;
        }
        (v2 - proj2).max(0.0).sqrt()
    }

    /// Strict membership `dist(z, plane) < thickness`.
    pub fn contains_point(&self, z: &[f64]) -> bool {
        self.plane_dist(z) < self.thickness
    }

    /// Total mass of atoms inside the plate.
    pub fn mass(&self, atoms: &[f64], masses: &[f64], dim: usize) -> f64 {
        sum_f64(masses.iter().enumerate().filter_map(|(i, &m)| {
            if self.contains_point(&atoms[i * dim..(i + 1) * dim]) {
                Some(m)
            } else {
                None
            }
        }))
    }

    /// Deterministic sample points of the central plane within distance 1
    /// of the anchor, on a grid of `steps` per plane direction. Pinning the
    /// extent at 1 keeps containment comparisons between plates
    /// extent-normalized regardless of where the plate sits in the ball.
    pub fn central_samples(&self, steps: usize) -> Vec<Vec<f64>> {
        let m = self.basis.len();
        let d = self.anchor.len();
        if m == 0 {
            return vec![self.anchor.clone()];
        }
        let extent = 1.0;
        let mut out = Vec::new();
        let mut idx = vec![0usize; m];
        loop {
            let t: Vec<f64> = idx
                .iter()
                .map(|&k| extent * (2.0 * (k as f64 + 0.5) / steps as f64 - 1.0))
                .collect();
            if sum_f64(t.iter().map(|x| x * x)).sqrt() <= extent {
                let p: Vec<f64> = (0..d)
                    .map(|i| {
                        self.anchor[i] + sum_f64(t.iter().zip(&self.basis).map(|(&c, b)| c * b[i]))
                    })
                    .collect();
                out.push(p);
            }
            let mut i = 0;
            loop {
                if i == m {
                    if out.is_empty() {
                        out.push(self.anchor.clone());
                    }
                    return out;
                }
                idx[i] += 1;
                if idx[i] < steps {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    /// Covering-sense containment of `inner` in `self`: every central-plane
    /// sample of `inner` inside the unit ball lies strictly within
    /// `self.thickness` of `self`'s central plane.
    pub fn covers_plate(&self, inner: &Plate, steps: usize) -> bool {
        inner
            .central_samples(steps)
            .iter()
            .all(|z| self.contains_point(z))
    }
}

/// A finite net of `(r, m)`-plates covering (in the central-plane sense) all
/// half-thickness plates that intersect the unit ball.
#[derive(Clone, Debug)]
pub struct PlateNet {
    pub dim: usize,
    pub m: usize,
    pub r: f64,
    orientations: Vec<NetOrientation>,
    /// flat anchors, one `dim`-chunk per plate
    anchors: Vec<f64>,
    /// for each plate, its orientation id; plates of one orientation are
    /// stored contiguously
    orient_of: Vec<u32>,
}

#[derive(Clone, Debug)]
struct NetOrientation {
    basis: Vec<Vec<f64>>,
    /// [start, end) range of plate ids with this orientation
    range: (usize, usize),
}

impl PlateNet {
    pub fn len(&self) -> usize {
        self.orient_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orient_of.is_empty()
    }

    pub fn orientation_count(&self) -> usize {
        self.orientations.len()
    }

    pub fn plate(&self, i: usize) -> Plate {
        let o = &self.orientations[self.orient_of[i] as usize];
        Plate {
            anchor: self.anchors[i * self.dim..(i + 1) * self.dim].to_vec(),
            basis: o.basis.clone(),
            thickness: self.r,
        }
    }

    pub fn plates(&self) -> impl Iterator<Item = Plate> + '_ {
        (0..self.len()).map(|i| self.plate(i))
    }

    /// Index of a net plate covering `inner` (central-plane sense), if any.
    /// Prefilters only discard plates that provably cannot cover; the plate
    /// the net construction guarantees always survives them.
    pub fn find_cover(&self, inner: &Plate, steps: usize) -> Option<usize> {
        let samples = inner.central_samples(steps);
        for o in &self.orientations {
            for i in o.range.0..o.range.1 {
                let anchor = &self.anchors[i * self.dim..(i + 1) * self.dim];
                if self.m < self.dim {
                    // a cover must bring the inner anchor within thickness
                    let mut v2 = 0.0;
                    for k in 0..self.dim {
                        let v = inner.anchor[k] - anchor[k];
                        v2 += v * v;
                    }
                    let mut proj2 = 0.0;
                    for b in &o.basis {
                        let mut cc = 0.0;
                        for k in 0..self.dim {
                            cc += b[k] * (inner.anchor[k] - anchor[k]);
                        }
                        proj2 += cc * cc;
                    }
                    if (v2 - proj2).max(0.0).sqrt() >= self.r {
                        continue;
                    }
                }
                let plate = Plate {
                    anchor: anchor.to_vec(),
                    basis: o.basis.clone(),
                    thickness: self.r,
                };
                if samples.iter().all(|z| plate.contains_point(z)) {
                    return Some(i);
                }
            }
        }
        None
    }

    /// Number of net plates whose central plane (sampled in the unit ball)
    /// lies inside the given plate.
    pub fn count_contained_in(&self, outer: &Plate, steps: usize) -> usize {
        let mut count = 0;
        for o in &self.orientations {
            let sin_angle = if self.m < self.dim && outer.plane_dim() < outer.dim() {
                sin_max_principal_angle(&o.basis, &outer.basis)
            } else {
                0.0
            };
            for i in o.range.0..o.range.1 {
                let anchor = &self.anchors[i * self.dim..(i + 1) * self.dim];
                // sound skip: if even the anchor sits deeper than
                // thickness + extent * angle, no central sample can be inside
                if outer.plane_dist(anchor) >= outer.thickness + sin_angle + 1e-12 {
                    continue;
                }
                let plate = self.plate(i);
                if outer.covers_plate(&plate, steps) {
                    count += 1;
                }
            }
        }
        count
    }
}

/// Orientation sample of the Grassmannian `Gr(m, d)` with largest principal
/// angle covering radius at most `ang`. Lines and hyperplanes come from
/// sphere nets; intermediate cases from graph charts over coordinate
/// subspaces, deduplicated by principal-angle distance.
fn orientation_net(d: usize, m: usize, ang: f64) -> Vec<Vec<Vec<f64>>> {
    if m == d {
        return vec![(0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                e
            })
            .collect()];
    }
    if m == 1 {
        return line_net(d, ang).into_iter().map(|v| vec![v]).collect();
    }
    if m == d - 1 {
        return line_net(d, ang)
            .iter()
            .map(|n| {
                let full = complete_basis(&[n.clone()], d);
                full[1..].to_vec()
            })
            .collect();
    }
    // graph charts: subspace = { (y, A y) } over each choice of m domain
    // coordinates, slopes |A_ij| <= 1 by the maximal-volume-minor argument
    let q = (m * (d - m)) as f64;
    let g = 1.8 * ang / q.sqrt();
    let steps = (2.0 / g).ceil() as usize + 1;
    let mut kept: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut charts: Vec<Vec<usize>> = Vec::new();
    // all m-subsets of coordinates
    let mut pick = (0..m).collect::<Vec<usize>>();
    loop {
        charts.push(pick.clone());
        let mut i = m;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if pick[i] + (m - i) <= d - 1 {
                pick[i] += 1;
                for j in i + 1..m {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                pick.clear();
                break;
            }
        }
        if pick.is_empty() {
            break;
        }
    }
    for chart in charts {
        let rest: Vec<usize> = (0..d).filter(|i| !chart.contains(i)).collect();
        let cells = (m * (d - m)) as u32;
        let total = (steps as u64).pow(cells);
        for code in 0..total {
            let mut c = code;
            let mut a = vec![0.0; m * (d - m)];
            for v in a.iter_mut() {
                let k = (c % steps as u64) as f64;
                c /= steps as u64;
                *v = -1.0 + k * g;
            }
            let cols: Vec<Vec<f64>> = (0..m)
                .map(|j| {
                    let mut col = vec![0.0; d];
                    col[chart[j]] = 1.0;
                    for (ri, &r) in rest.iter().enumerate() {
                        col[r] = a[ri * m + j];
                    }
                    col
                })
                .collect();
            if let Some(basis) = gram_schmidt(&cols) {
                let dup = kept
                    .iter()
                    .any(|other| sin_max_principal_angle(other, &basis) < ang / 2.0);
                if !dup {
                    kept.push(basis);
                }
            }
        }
    }
    kept
}

/// Builds the plate net `E_{r,m}`: an orientation net crossed with a
/// translation lattice in each normal space. For `m = d` the net is the
/// single trivial plate containing everything.
pub fn build_plate_net(r: f64, m: usize, d: usize) -> Result<PlateNet> {
    if m < 1 || m > d {
        return Err(Error::InvalidDimension(alloc::format!(
            "plate plane dimension m = {m} outside [1, {d}]"
        )));
    }
    if !(2.0_f64.powi(-12)..=1.0 + 1e-12).contains(&r) {
        return Err(Error::InvalidScale(alloc::format!(
            "plate thickness r = {r} outside [2^-12, 1]"
        )));
    }
    if m == d {
        let basis: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                e
            })
            .collect();
        return Ok(PlateNet {
            dim: d,
            m,
            r,
            orientations: vec![NetOrientation {
                basis,
                range: (0, 1),
            }],
            anchors: vec![0.0; d],
            orient_of: vec![0],
        });
    }
    let ang = NET_ANGLE_FRAC * r;
    let off_cov = NET_OFFSET_FRAC * r;
    let bases = orientation_net(d, m, ang);
    let mut orientations = Vec::with_capacity(bases.len());
    let mut anchors: Vec<f64> = Vec::new();
    let mut orient_of: Vec<u32> = Vec::new();
    for (oi, basis) in bases.into_iter().enumerate() {
        let full = complete_basis(&basis, d);
        let normal_basis = full[m..].to_vec();
        let nd = d - m;
        let h = 2.0 * off_cov / (nd as f64).sqrt();
        let kmax = ((1.0 + r) / h).ceil() as i64;
        let start = orient_of.len();
        let mut idx = vec![-kmax; nd];
        loop {
            let w: Vec<f64> = (0..d)
                .map(|i| {
                    sum_f64(
                        idx.iter()
                            .zip(&normal_basis)
                            .map(|(&k, nb)| k as f64 * h * nb[i]),
                    )
                })
                .collect();
            if norm(&w) <= 1.0 + r {
                anchors.extend_from_slice(&w);
                orient_of.push(oi as u32);
            }
            let mut i = 0;
            let mut done = false;
            loop {
                if i == nd {
                    done = true;
                    break;
                }
                idx[i] += 1;
                if idx[i] <= kmax {
                    break;
                }
                idx[i] = -kmax;
                i += 1;
            }
            if done {
                break;
            }
        }
        orientations.push(NetOrientation {
            basis,
            range: (start, orient_of.len()),
        });
    }
    Ok(PlateNet {
        dim: d,
        m,
        r,
        orientations,
        anchors,
        orient_of,
    })
}

/// Seeded random plate intersecting the unit ball: uniform-ish plane
/// orientation from Gaussian draws, anchor drawn in the ball and projected
/// onto the plane's normal space.
pub fn random_plate(d: usize, m: usize, thickness: f64, seed: u64) -> Plate {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || {
        let u1: f64 = rng.random::<f64>().max(1e-12);
        let u2: f64 = rng.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
    };
    let basis = loop {
        let cols: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..d).map(|_| gauss()).collect())
            .collect();
        if let Some(b) = gram_schmidt(&cols) {
            break b;
        }
    };
    let point: Vec<f64> = loop {
        let p: Vec<f64> = (0..d).map(|_| gauss()).collect();
        let n = norm(&p);
        if n > 1e-9 {
            let scale = rng.random::<f64>().powf(1.0 / d as f64) / n;
            break p.iter().map(|v| v * scale).collect();
        }
    };
    // anchor = closest plane point to the origin
    let mut anchor = point.clone();
    for b in &basis {
        let c = dot(&point, b);
        for i in 0..d {
            anchor[i] -= c * b[i];
        }
    }
    Plate {
        anchor,
        basis,
        thickness,
    }
}

/// Containment of the dilated tube in a plate: all deterministic boundary
/// samples (8 cross-section rings, `2^d` generators each, plus ring
/// centers) lie strictly within the plate thickness of the central plane.
pub fn tube_in_plate(t: &Tube, h: &Plate, dilation: f64) -> bool {
    debug_assert!(dilation >= 1.0);
    if h.plane_dim() == h.dim() {
        return true;
    }
    let d = t.dim();
    let cross = complete_basis(&[t.direction.clone()], d);
    let cross = &cross[1..];
    let ngen = 1usize << d;
    let rad = dilation * t.radius;
    for ring in 0..8 {
        let s = t.length / 2.0 * (2.0 * ring as f64 / 7.0 - 1.0);
        let center: Vec<f64> = (0..d)
            .map(|i| t.axis_point[i] + s * t.direction[i])
            .collect();
        if !h.contains_point(&center) {
            return false;
        }
        for gen in 0..ngen {
            let phi = 2.0 * core::f64::consts::PI * gen as f64 / ngen as f64;
            // boundary direction in the cross-section plane; for d = 2 the
            // cross-section is one-dimensional and alternates sides
            let z: Vec<f64> = if d == 2 {
                let sgn = if gen % 2 == 0 { 1.0 } else { -1.0 };
                (0..d).map(|i| center[i] + sgn * rad * cross[0][i]).collect()
            } else {
                (0..d)
                    .map(|i| {
                        let mut v = phi.cos() * cross[0][i] + phi.sin() * cross[1][i];
                        if d > 3 {
                            // spread remaining coordinates deterministically
                            for (ci, cb) in cross.iter().enumerate().skip(2) {
                                let ang2 = phi * (ci as f64 + 1.0);
                                v = v * ang2.cos().abs().max(0.5) + ang2.sin() * cb[i] * 0.5;
                            }
                        }
                        center[i] + rad * v
                    })
                    .collect()
            };
            if !h.contains_point(&z) {
                return false;
            }
        }
    }
    true
}

/// Principal `m`-subspace of the second-moment form of the directions and
/// the maximum angle (radians) from any input direction to that subspace.
/// Inputs are canonically sorted first, so the result is permutation
/// invariant bit for bit.
pub fn concentration_angle(directions: &[Vec<f64>], m: usize) -> Result<(Vec<Vec<f64>>, f64)> {
    if directions.is_empty() {
        return Err(Error::EmptyInput("direction list".to_string()));
    }
    let d = directions[0].len();
    if m < 2 || m > d {
        return Err(Error::InvalidDimension(alloc::format!(
            "subspace dimension m = {m} outside [2, {d}]"
        )));
    }
    let mut dirs: Vec<Vec<f64>> = directions
        .iter()
        .map(|v| normalize(v).ok_or_else(|| Error::Domain("zero direction".to_string())))
        .collect::<Result<_>>()?;
    dirs.sort_by(|a, b| {
        a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut moment = vec![0.0; d * d];
    for v in &dirs {
        for i in 0..d {
            for j in 0..d {
                moment[i * d + j] += v[i] * v[j];
            }
        }
    }
    let (_, vecs) = jacobi_eigh(d, &moment);
    let basis: Vec<Vec<f64>> = vecs.into_iter().take(m).collect();
    let basis = gram_schmidt(&basis).unwrap_or_else(|| complete_basis(&[], m.min(d)));
    let max_angle = dirs
        .iter()
        .map(|v| sin_angle_to_subspace(&basis, v).asin())
        .fold(0.0, f64::max);
    Ok((basis, max_angle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scale;

    #[test]
    fn caps_tile_r100_d2() {
        let caps = build_caps(100.0, 2).unwrap();
        assert_eq!(caps.len(), 20);
        for c in &caps {
            assert!((c.scale - 0.1).abs() < 1e-15);
        }
        let area = sum_f64(caps.iter().map(|c| c.clipped_area()));
        assert!((area - 2.0).abs() < 2e-9);
    }

    #[test]
    fn caps_r256_d3_count() {
        let caps = build_caps(256.0, 3).unwrap();
        assert_eq!(caps.len(), 1024);
        let area = sum_f64(caps.iter().map(|c| c.clipped_area()));
        assert!((area - 4.0).abs() < 4e-9);
    }

    #[test]
    fn caps_r4_width_and_normal() {
        let caps = build_caps(4.0, 2).unwrap();
        assert_eq!(caps.len(), 4);
        assert!((caps[0].scale - 0.5).abs() < 1e-15);
        // gradient of |xi|^2 vanishes at 0: normal is +-e_d there
        let n0 = paraboloid_normal(&[0.0]);
        assert!((n0[0]).abs() < 1e-15);
        assert!((n0[1].abs() - 1.0).abs() < 1e-15);
        for c in &caps {
            let expect = paraboloid_normal(&c.center);
            for i in 0..2 {
                assert!((c.normal[i] - expect[i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn caps_tile_non_square_r() {
        // 2 sqrt(R) not an integer: edge cells clip, area still exact
        let caps = build_caps(512.0, 2).unwrap();
        let area = sum_f64(caps.iter().map(|c| c.clipped_area()));
        assert!((area - 2.0).abs() < 2e-9);
    }

    #[test]
    fn caps_reject_small_scale() {
        assert!(matches!(build_caps(3.9, 2), Err(Error::InvalidScale(_))));
    }

    #[test]
    fn tube_dimensions_per_mode() {
        let caps = build_caps(256.0, 2).unwrap();
        let ts = build_tubes(&caps[3], 256.0, 0.0, ScaleMode::ScaleR).unwrap();
        assert!((ts[0].radius - 16.0).abs() < 1e-12);
        assert!((ts[0].length - 256.0).abs() < 1e-12);
        let tu = build_tubes(&caps[3], 256.0, 0.0, ScaleMode::UnitBall).unwrap();
        assert!((tu[0].radius - 1.0 / 16.0).abs() < 1e-12);
        assert!((tu[0].length - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tube_cross_section_count_near_lattice_estimate() {
        for d in [2usize, 3] {
            let caps = build_caps(256.0, d).unwrap();
            let fam =
                build_tube_family_for_caps(&caps[..1], 256.0, 0.0, ScaleMode::ScaleR).unwrap();
            let cross = fam.groups[0]
                .members
                .iter()
                .filter(|(_, a, _)| *a == 0)
                .count() as f64;
            let expect = 16.0_f64.powi(d as i32 - 1);
            assert!(
                cross >= expect / 8.0 && cross <= 8.0 * expect,
                "d={d} cross-sections {cross} vs ~{expect}"
            );
        }
    }

    #[test]
    fn tube_covering_multiplicity() {
        for (d, mode, rho) in [
            (2usize, ScaleMode::ScaleR, 256.0),
            (2, ScaleMode::UnitBall, 2.0),
            (3, ScaleMode::UnitBall, 2.0),
        ] {
            let caps = build_caps(256.0, d).unwrap();
            let fam = build_tube_family_for_caps(&caps[..1], 256.0, 0.0, mode).unwrap();
            let cmax = 4.0_f64.powi(d as i32) as usize;
            for k in 0..2000usize {
                let x: Vec<f64> = (0..d)
                    .map(|i| {
                        let t = ((k as f64 + 1.0) * (1.3 + i as f64) * 0.618033988749).fract();
                        rho * (2.0 * t - 1.0) / (d as f64).sqrt()
                    })
                    .collect();
                if norm(&x) > rho {
                    continue;
                }
                let hits = fam.tubes.iter().filter(|t| t.contains(&x, 1.0)).count();
                assert!(hits >= 1, "uncovered point {x:?} (d={d}, {mode:?})");
                assert!(hits <= cmax, "multiplicity {hits} > {cmax}");
            }
        }
    }

    #[test]
    fn plate_net_count_d2() {
        let net = build_plate_net(0.25, 1, 2).unwrap();
        assert!(
            (8..=256).contains(&net.len()),
            "net size {} outside [8, 256]",
            net.len()
        );
    }

    #[test]
    fn plate_net_trivial_at_r1() {
        let net = build_plate_net(1.0, 1, 2).unwrap();
        assert!(net.len() <= 64);
        // the slab through the origin covers the unit ball
        let slab = net
            .plates()
            .min_by(|a, b| {
                norm(&a.anchor)
                    .partial_cmp(&norm(&b.anchor))
                    .unwrap()
            })
            .unwrap();
        for k in 0..200 {
            let th = 0.0314 * k as f64;
            let z = [0.99 * th.cos(), 0.99 * th.sin()];
            assert!(slab.contains_point(&z));
        }
    }

    #[test]
    fn plate_net_m_equals_d_is_trivial() {
        let net = build_plate_net(0.5, 2, 2).unwrap();
        assert_eq!(net.len(), 1);
        assert!(net.plate(0).contains_point(&[0.3, -0.9]));
    }

    #[test]
    fn plate_net_rejects_bad_m() {
        assert!(matches!(
            build_plate_net(0.25, 0, 2),
            Err(Error::InvalidDimension(_))
        ));
        assert!(matches!(
            build_plate_net(0.25, 3, 2),
            Err(Error::InvalidDimension(_))
        ));
    }

    fn pseudo_unit(seedmix: u64, d: usize) -> Vec<f64> {
        let mut v = Vec::with_capacity(d);
        let mut s = seedmix.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1);
        for _ in 0..d {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            v.push(((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0);
        }
        normalize(&v).unwrap_or_else(|| {
            let mut e = vec![0.0; d];
            e[0] = 1.0;
            e
        })
    }

    #[test]
    fn plate_net_covers_random_half_plates_d2() {
        let r = 0.25;
        let net = build_plate_net(r, 1, 2).unwrap();
        for k in 0..1000u64 {
            let dir = pseudo_unit(k, 2);
            let normal = vec![-dir[1], dir[0]];
            let t = ((k as f64 * 0.37543).fract() * 2.0 - 1.0) * 0.99;
            let inner = Plate {
                anchor: scale(&normal, t),
                basis: vec![dir],
                thickness: r / 2.0,
            };
            assert!(
                net.find_cover(&inner, 16).is_some(),
                "uncovered half-plate k={k}"
            );
        }
    }

    #[test]
    fn tube_in_plate_basic_cases() {
        // axis in the plane, thin tube: contained
        let h = Plate {
            anchor: vec![0.0, 0.0, 0.0],
            basis: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            thickness: 0.25,
        };
        let t = Tube {
            axis_point: vec![0.0, 0.0, 0.0],
            direction: vec![1.0, 0.0, 0.0],
            radius: 0.05,
            length: 2.0,
            cap_index: None,
            mode: ScaleMode::UnitBall,
        };
        assert!(tube_in_plate(&t, &h, 1.0));
        // orthogonal long tube: endpoint distance exceeds thickness
        let t2 = Tube {
            direction: vec![0.0, 0.0, 1.0],
            ..t.clone()
        };
        assert!(!tube_in_plate(&t2, &h, 1.0));
        // boundary tangency fails under strict inequality
        let t3 = Tube {
            axis_point: vec![0.0, 0.0, 0.2],
            radius: 0.05,
            ..t.clone()
        };
        // plane distance of boundary samples is exactly 0.25
        assert!(!tube_in_plate(&t3, &h, 1.0));
        // monotone in dilation
        assert!(tube_in_plate(&t, &h, 3.0) || !tube_in_plate(&t, &h, 1.0));
    }

    #[test]
    fn concentration_angle_cases() {
        // all directions equal e_3
        let e3 = vec![vec![0.0, 0.0, 1.0]; 5];
        let (_, ang) = concentration_angle(&e3, 2).unwrap();
        assert!(ang < 1e-7);
        // single direction
        let (_, ang1) = concentration_angle(&[vec![1.0, 0.0, 0.0]], 2).unwrap();
        assert!(ang1 < 1e-7);
        // coordinate frame in d=3 cannot be 2-concentrated below pi/4
        let frame = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let (_, ang3) = concentration_angle(&frame, 2).unwrap();
        assert!(ang3 >= core::f64::consts::FRAC_PI_4 - 1e-9);
        assert!(matches!(
            concentration_angle(&[], 2),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn concentration_angle_brute_force_certificate() {
        // brute force over a fine net of 2-planes in R^3: the best plane for
        // the coordinate frame has normal (1,1,1)/sqrt(3) and max angle
        // asin(1/sqrt(3)); any plane, our fit included, sits at or above it
        let frame = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let mut best = f64::INFINITY;
        for n in covering_net(3, 0.06) {
            let basis = complete_basis(&[n], 3);
            let plane = &basis[1..];
            let worst = frame
                .iter()
                .map(|v| sin_angle_to_subspace(plane, v).asin())
                .fold(0.0, f64::max);
            best = best.min(worst);
        }
        let optimum = (1.0 / 3.0_f64.sqrt()).asin();
        assert!((best - optimum).abs() < 0.02, "brute force best {best}");
        let (_, fitted) = concentration_angle(&frame, 2).unwrap();
        assert!(fitted >= best - 1e-9);
        assert!(fitted >= core::f64::consts::FRAC_PI_4);
    }
}
