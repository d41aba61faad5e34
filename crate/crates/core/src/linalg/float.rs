//! Floating-point kernels. Decompositions are delegated to faer; this
//! module adds rank thresholds and canonical basis representatives.

use faer::linalg::solvers::DenseSolveCore;
use faer::Side;

use super::{Mat, Tolerance};
use crate::error::{Error, Result};

pub(crate) fn to_faer(m: &Mat<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub(crate) fn from_faer(d: faer::MatRef<'_, f64>) -> Mat<f64> {
    Mat::from_fn(d.nrows(), d.ncols(), |i, j| d[(i, j)])
}

/// Singular values in descending order.
pub fn singular_values(m: &Mat<f64>) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    to_faer(m)
        .singular_values()
        .expect("SVD converges on finite input")
}

fn threshold(sigma_max: f64, tol: &Tolerance, scale: f64) -> f64 {
    tol.rank_rel_tol * sigma_max.max(scale)
}

pub(crate) fn rank(m: &Mat<f64>, tol: &Tolerance, scale: f64) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    let thr = threshold(smax, tol, scale);
    s.iter().filter(|&&v| v > thr).count()
}

/// Full SVD: `(sigma, u, v)` with `sigma` descending, `u` square of order
/// `rows` and `v` square of order `cols`. `sigma` has `min(rows, cols)`
/// entries paired with the leading columns of `u` and `v`.
fn full_svd(m: &Mat<f64>) -> (Vec<f64>, Mat<f64>, Mat<f64>) {
    let svd = to_faer(m).svd().expect("SVD converges on finite input");
    let sigma = svd.S().column_vector().iter().copied().collect();
    (sigma, from_faer(svd.U()), from_faer(svd.V()))
}

/// Orthonormal kernel basis, canonicalized.
pub(crate) fn null_space(m: &Mat<f64>, tol: &Tolerance, scale: f64) -> Mat<f64> {
    let c = m.cols();
    if c == 0 {
        return Mat::zeros(0, 0);
    }
    if m.rows() == 0 || m.max_abs() == 0.0 {
        return Mat::identity(c);
    }
    let (sigma, _, v) = full_svd(m);
    let thr = threshold(sigma[0], tol, scale);
    // columns past min(rows, cols) are kernel directions with no singular value
    let keep: Vec<usize> = (0..c)
        .filter(|&k| sigma.get(k).is_none_or(|&s| s <= thr))
        .collect();
    let basis = Mat::from_fn(c, keep.len(), |i, k| v[(i, keep[k])]);
    canonical_orthonormal_basis(&basis, tol)
}

/// Orthonormal basis of the column space, canonicalized.
pub(crate) fn column_basis(m: &Mat<f64>, tol: &Tolerance) -> Mat<f64> {
    let r = m.rows();
    if m.cols() == 0 || r == 0 || m.max_abs() == 0.0 {
        return Mat::zeros(r, 0);
    }
    let (sigma, u, _) = full_svd(m);
    let thr = threshold(sigma[0], tol, 0.0);
    let keep: Vec<usize> = (0..sigma.len().min(u.cols()))
        .filter(|&k| sigma[k] > thr)
        .collect();
    let basis = Mat::from_fn(r, keep.len(), |i, k| u[(i, keep[k])]);
    canonical_orthonormal_basis(&basis, tol)
}

/// Deterministic orthonormal basis for the span of the orthonormal columns
/// of `q`, depending only on that span.
///
/// Runs pivoted Gram-Schmidt over the columns of the projector `q qᵀ`
/// (largest residual first, lowest index on ties), then makes the first
/// entry above `witness_tol` in each column positive.
pub fn canonical_orthonormal_basis(q: &Mat<f64>, tol: &Tolerance) -> Mat<f64> {
    let (n, k) = (q.rows(), q.cols());
    if k == 0 {
        return Mat::zeros(n, 0);
    }
    let proj = q * &q.transpose();
    let mut residuals = proj.columns();
    let mut picked: Vec<Vec<f64>> = Vec::with_capacity(k);
    for _ in 0..k {
        let norms: Vec<f64> = residuals.iter().map(|r| l2(r)).collect();
        let best_norm = norms.iter().copied().fold(0.0, f64::max);
        let j = norms
            .iter()
            .position(|&v| v >= best_norm * (1.0 - 1e-12))
            .expect("nonempty");
        let mut v = residuals[j].clone();
        // Second pass of orthogonalization for stability.
        for _ in 0..2 {
            for p in &picked {
                let c: f64 = dotf(&v, p);
                for (vi, pi) in v.iter_mut().zip(p) {
                    *vi -= c * pi;
                }
            }
        }
        let nv = l2(&v);
        for vi in v.iter_mut() {
            *vi /= nv;
        }
        for r in residuals.iter_mut() {
            let c = dotf(r, &v);
            for (ri, vi) in r.iter_mut().zip(&v) {
                *ri -= c * vi;
            }
        }
        picked.push(v);
    }
    for v in picked.iter_mut() {
        canonicalize_sign(v, tol.witness_tol);
    }
    Mat::from_columns(&picked, n).expect("consistent lengths")
}

/// Flips `v` so its first entry with magnitude above `tol` is positive.
pub fn canonicalize_sign(v: &mut [f64], tol: f64) {
    if let Some(first) = v.iter().find(|x| x.abs() > tol) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub(crate) fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_symmetric(s: &Mat<f64>, tol: &Tolerance) -> Result<()> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch {
            expected: s.rows(),
            got: s.cols(),
        });
    }
    let asym = s.max_abs_diff(&s.transpose());
    if asym > tol.symmetry_tol * s.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Eigen-decomposition of a symmetric matrix: eigenvalues descending, with
/// eigenvectors as the matching columns (sign-canonicalized).
pub fn symmetric_eigen(s: &Mat<f64>, tol: &Tolerance) -> Result<(Vec<f64>, Mat<f64>)> {
    check_symmetric(s, tol)?;
    let n = s.rows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let sym = faer::Mat::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    let eig = sym
        .self_adjoint_eigen(Side::Lower)
        .expect("eigensolver converges on finite input");
    let (lambda, u) = (eig.S().column_vector(), eig.U());
    // faer sorts ascending
    let values = (0..n).rev().map(|k| lambda[k]).collect();
    let mut cols: Vec<Vec<f64>> = (0..n)
        .rev()
        .map(|k| (0..n).map(|i| u[(i, k)]).collect())
        .collect();
    for c in cols.iter_mut() {
        canonicalize_sign(c, tol.witness_tol);
    }
    Ok((values, Mat::from_columns(&cols, n)?))
}

/// `S^{-1/2}` for symmetric positive definite `S`.
pub fn inv_sqrt_psd(s: &Mat<f64>, tol: &Tolerance) -> Result<Mat<f64>> {
    let (values, vecs) = symmetric_eigen(s, tol)?;
    let n = values.len();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let lmax = values[0];
    let lmin = values[n - 1];
    if lmax <= 0.0 || lmin <= tol.rank_rel_tol * lmax {
        return Err(Error::NotPositiveDefinite(lmin));
    }
    let scaled = Mat::from_fn(n, n, |i, k| vecs[(i, k)] / values[k].sqrt());
    let r = &scaled * &vecs.transpose();
    Ok(Mat::from_fn(n, n, |i, j| 0.5 * (r[(i, j)] + r[(j, i)])))
}

/// Orthonormal basis of `ker(t_star)`, canonicalized. For a synthesis
/// matrix this spans `range(I - P)` where `P` projects onto the range of the
/// analysis operator.
pub fn orthonormal_kernel_basis(t_star: &Mat<f64>, tol: &Tolerance) -> Mat<f64> {
    null_space(t_star, tol, 0.0)
}

pub(crate) fn inverse(m: &Mat<f64>, tol: &Tolerance) -> Option<Mat<f64>> {
    let n = m.rows();
    if n == 0 {
        return Some(Mat::zeros(0, 0));
    }
    if rank(m, tol, 0.0) < n {
        return None;
    }
    let inv = to_faer(m).full_piv_lu().inverse();
    Some(from_faer(inv.as_ref()))
}

/// Least-squares minimum-norm solution, accepted when the residual is within
/// `witness_tol` (relative to the right-hand side scale).
pub(crate) fn solve(a: &Mat<f64>, b: &[f64], tol: &Tolerance) -> Option<Vec<f64>> {
    let n = a.cols();
    if a.rows() == 0 {
        return Some(vec![0.0; n]);
    }
    let x = if n == 0 || a.max_abs() == 0.0 {
        vec![0.0; n]
    } else {
        let (sigma, u, v) = full_svd(a);
        let thr = threshold(sigma[0], tol, 0.0);
        let mut x = vec![0.0; n];
        for k in 0..sigma.len().min(u.cols()) {
            if sigma[k] <= thr {
                continue;
            }
            let c: f64 = (0..a.rows()).map(|i| u[(i, k)] * b[i]).sum::<f64>() / sigma[k];
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += c * v[(i, k)];
            }
        }
        x
    };
    let ax = a.mul_vec(&x);
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let resid = ax
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    (resid <= tol.witness_tol * scale).then_some(x)
}
