//! Small dense vector/matrix helpers for the low ambient dimensions used by
//! the geometry module. Everything is `Vec<f64>` based; dimensions are 2..=6
//! in practice so no BLAS-style machinery is warranted.

use crate::sums::sum_f64;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub(crate) fn normalize(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n < 1e-14 {
        None
    } else {
        Some(scale(a, 1.0 / n))
    }
}

/// Component of `v` orthogonal to the orthonormal family `basis`.
pub(crate) fn reject(basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    for b in basis {
        let c = dot(&out, b);
        for i in 0..out.len() {
            out[i] -= c * b[i];
        }
    }
    out
}

/// Gram-Schmidt with re-orthogonalization. Returns `None` when the input
/// family is numerically degenerate.
pub(crate) fn gram_schmidt(vectors: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let r = reject(&basis, v);
        let r = reject(&basis, &r);
        let u = normalize(&r)?;
        basis.push(u);
    }
    Some(basis)
}

/// Extends an orthonormal family to a full orthonormal basis of `R^d`,
/// deterministically, by rejecting coordinate axes in index order.
pub(crate) fn complete_basis(partial: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = partial.to_vec();
    for axis in 0..d {
        if basis.len() == d {
            break;
        }
        let mut e = vec![0.0; d];
        e[axis] = 1.0;
        let r = reject(&basis, &e);
        let r = reject(&basis, &r);
        if let Some(u) = normalize(&r) {
            basis.push(u);
        }
    }
    debug_assert_eq!(basis.len(), d);
    basis
}

/// `sin` of the angle between a unit vector and the subspace spanned by an
/// orthonormal basis (the norm of the rejected component).
pub(crate) fn sin_angle_to_subspace(basis: &[Vec<f64>], unit: &[f64]) -> f64 {
    norm(&reject(basis, unit)).min(1.0)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix (row-major).
/// Returns eigenvalues in descending order with matching unit eigenvectors.
pub(crate) fn jacobi_eigh(n: usize, mat: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    debug_assert_eq!(mat.len(), n * n);
    let mut a = mat.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&i| a[i * n + i]).collect();
    let vecs = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
        .collect();
    (vals, vecs)
}

/// `sin` of the largest principal angle between two equal-dimension
/// subspaces given by orthonormal bases. Computed from the smallest
/// singular value of the cross-Gram matrix.
pub(crate) fn sin_max_principal_angle(u: &[Vec<f64>], w: &[Vec<f64>]) -> f64 {
    let m = u.len();
    debug_assert_eq!(m, w.len());
    // G = U^T W (m x m); singular values are the cosines of the principal
    // angles, so we take eigenvalues of G G^T.
    let mut g = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            g[i * m + j] = dot(&u[i], &w[j]);
        }
    }
    let mut ggt = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            ggt[i * m + j] = sum_f64((0..m).map(|k| g[i * m + k] * g[j * m + k]));
        }
    }
    let (vals, _) = jacobi_eigh(m, &ggt);
    let cos2 = vals[m - 1].clamp(0.0, 1.0);
    (1.0 - cos2).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_recovers_diagonal() {
        let mat = [3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0];
        let (vals, vecs) = jacobi_eigh(3, &mat);
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!((vals[2] - 1.0).abs() < 1e-12);
        assert!((vecs[0][0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_symmetric_2x2() {
        // eigenvalues of [[2,1],[1,2]] are 3 and 1
        let (vals, vecs) = jacobi_eigh(2, &[2.0, 1.0, 1.0, 2.0]);
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        let v = &vecs[0];
        assert!((v[0] - v[1]).abs() < 1e-10);
    }

    #[test]
    fn principal_angle_between_rotated_lines() {
        let u = vec![vec![1.0, 0.0]];
        let th: f64 = 0.3;
        let w = vec![vec![th.cos(), th.sin()]];
        assert!((sin_max_principal_angle(&u, &w) - th.sin()).abs() < 1e-12);
    }

    #[test]
    fn gram_schmidt_rejects_degenerate() {
        let vs = vec![vec![1.0, 0.0], vec![2.0, 1e-16]];
        assert!(gram_schmidt(&vs).is_none());
    }

    #[test]
    fn complete_basis_is_orthonormal() {
        let partial = vec![normalize(&[1.0, 2.0, 2.0]).unwrap()];
        let basis = complete_basis(&partial, 3);
        assert_eq!(basis.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&basis[i], &basis[j]) - expect).abs() < 1e-12);
            }
        }
    }
}
