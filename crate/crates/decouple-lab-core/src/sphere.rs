//! Deterministic point families on spheres: covering nets (for direction
//! nets of tubes and plate orientations) and equal-weight quadrature nodes
//! (for the normalized surface measure of a large sphere).

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

const PI: f64 = core::f64::consts::PI;

/// Covering net on the unit sphere `S^{d-1}` in `R^d` with geodesic covering
/// radius at most `cov`. Built from colatitude bands; the recursive bound
/// uses the spherical right-triangle inequality
/// `hypotenuse <= sqrt(a^2 + b^2)`, splitting `cov` evenly between the band
/// direction and the in-band net.
pub(crate) fn covering_net(d: usize, cov: f64) -> Vec<Vec<f64>> {
    assert!(d >= 1);
    assert!(cov > 0.0);
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            // circle: N points at spacing 2*pi/N, covering radius pi/N
            let n = (PI / cov).ceil() as usize;
            let n = n.max(1);
            (0..n)
                .map(|k| {
                    let th = 2.0 * PI * (k as f64) / (n as f64);
                    vec![th.cos(), th.sin()]
                })
                .collect()
        }
        _ => {
            let half = cov / core::f64::consts::SQRT_2;
            let bands = ((PI / (2.0 * half)).ceil() as usize).max(1);
            let dth = PI / bands as f64;
            let mut out = Vec::new();
            for b in 0..bands {
                let theta = (b as f64 + 0.5) * dth;
                let (s, c) = (theta.sin(), theta.cos());
                // in-band net on S^{d-2}, scaled so its arc error stays
                // below `half` after multiplication by sin(theta)
                let sub_cov = if s < 1e-9 { PI } else { (half / s).min(PI) };
                for y in covering_net(d - 1, sub_cov) {
                    let mut p = Vec::with_capacity(d);
                    p.push(c);
                    p.extend(y.iter().map(|v| v * s));
                    out.push(p);
                }
            }
            out
        }
    }
}

/// Net of lines (antipodally identified directions) with angular covering
/// radius at most `cov`.
pub(crate) fn line_net(d: usize, cov: f64) -> Vec<Vec<f64>> {
    if d == 2 {
        let n = ((PI / (2.0 * cov)).ceil() as usize).max(1);
        return (0..n)
            .map(|k| {
                let th = PI * (k as f64 + 0.5) / (n as f64);
                vec![th.cos(), th.sin()]
            })
            .collect();
    }
    // canonicalize sign and deduplicate on a fine grid
    let mut seen = alloc::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mut p in covering_net(d, cov) {
        if let Some(first) = p.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                for v in p.iter_mut() {
                    *v = -*v;
                }
            }
        }
        let key: Vec<i64> = p.iter().map(|v| (v * 1e9).round() as i64).collect();
        if seen.insert(key) {
            out.push(p);
        }
    }
    out
}

/// `n` equal-weight nodes distributed over `S^{d-1}`, deterministic.
/// d = 2 uses uniform angles, d = 3 the Fibonacci spiral, higher dimensions
/// proportional colatitude bands.
pub(crate) fn sphere_points(d: usize, n: usize) -> Vec<Vec<f64>> {
    assert!(d >= 2);
    assert!(n >= 1);
    match d {
        2 => (0..n)
            .map(|k| {
                let th = 2.0 * PI * (k as f64 + 0.5) / (n as f64);
                vec![th.cos(), th.sin()]
            })
            .collect(),
        3 => {
            let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
            (0..n)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = 2.0 * PI * (k as f64) / golden;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let bands = ((n as f64).powf(1.0 / (d as f64 - 1.0)).ceil() as usize).max(1);
            let dth = PI / bands as f64;
            // allocate counts proportional to band area ~ sin^{d-2}(theta)
            let weights: Vec<f64> = (0..bands)
                .map(|b| ((b as f64 + 0.5) * dth).sin().powi(d as i32 - 2))
                .collect();
            let total: f64 = weights.iter().sum();
            let mut out = Vec::new();
            for b in 0..bands {
                let theta = (b as f64 + 0.5) * dth;
                let nb = ((weights[b] / total * n as f64).round() as usize).max(1);
                let (s, c) = (theta.sin(), theta.cos());
                for y in sphere_points(d - 1, nb) {
                    let mut p = Vec::with_capacity(d);
                    p.push(c);
                    p.extend(y.iter().map(|v| v * s));
                    out.push(p);
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, norm};

    fn geodesic(a: &[f64], b: &[f64]) -> f64 {
        dot(a, b).clamp(-1.0, 1.0).acos()
    }

    #[test]
    fn covering_radius_holds_on_random_probes() {
        // deterministic low-discrepancy probes via a simple Weyl sequence
        for d in [2usize, 3, 4] {
            let cov = 0.22;
            let net = covering_net(d, cov);
            for k in 0..2000usize {
                let mut v: Vec<f64> = (0..d)
                    .map(|i| {
                        let t = ((k as f64 + 1.0) * (0.5 + i as f64) * 0.7548776662466927).fract();
                        2.0 * t - 1.0
                    })
                    .collect();
                let n = norm(&v);
                if n < 1e-3 {
                    continue;
                }
                for x in v.iter_mut() {
                    *x /= n;
                }
                let best = net
                    .iter()
                    .map(|p| geodesic(p, &v))
                    .fold(f64::INFINITY, f64::min);
                assert!(best <= cov + 1e-9, "d={d} gap {best} > {cov}");
            }
        }
    }

    #[test]
    fn line_net_covers_directions_up_to_sign() {
        let cov = 0.1;
        let net = line_net(3, cov);
        for k in 0..500usize {
            let mut v: Vec<f64> = (0..3)
                .map(|i| ((k * 37 + i * 11 + 5) % 101) as f64 / 50.0 - 1.0)
                .collect();
            let n = norm(&v);
            if n < 1e-3 {
                continue;
            }
            for x in v.iter_mut() {
                *x /= n;
            }
            let best = net
                .iter()
                .map(|p| geodesic(p, &v).min(geodesic(p, &v.iter().map(|t| -t).collect::<Vec<_>>())))
                .fold(f64::INFINITY, f64::min);
            assert!(best <= cov + 1e-9, "line gap {best}");
        }
    }

    #[test]
    fn sphere_points_have_unit_norm_and_low_moment() {
        for d in [2usize, 3] {
            let pts = sphere_points(d, 500);
            assert_eq!(pts.len(), 500);
            let mut mean = vec![0.0; d];
            for p in &pts {
                assert!((norm(p) - 1.0).abs() < 1e-12);
                for i in 0..d {
                    mean[i] += p[i] / 500.0;
                }
            }
            assert!(norm(&mean) < 0.02, "mean {mean:?}");
        }
    }
}
