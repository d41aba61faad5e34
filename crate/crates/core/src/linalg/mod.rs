//! Dense linear algebra over two arithmetic modes.
//!
//! Every span and independence decision goes through the [`Field`] trait:
//! [`Rational`] runs exact fraction-free elimination, `f64` runs SVD with a
//! relative singular-value threshold.

mod dense;
pub mod exact;
pub mod float;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use dense::{add_vec, dot, norm_f64, norm_sq, outer, scale_vec, sub_vec, to_f64_vec, Mat};
pub use float::{
    canonical_orthonormal_basis, inv_sqrt_psd, orthonormal_kernel_basis, singular_values,
    symmetric_eigen,
};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Rational = num_rational::BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Exact,
    Float,
}

impl fmt::Display for ArithmeticMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithmeticMode::Exact => "exact",
            ArithmeticMode::Float => "float",
        })
    }
}

/// Numerical tolerances. Exact arithmetic ignores all of them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Singular values at or below `rank_rel_tol * sigma_max` count as zero.
    pub rank_rel_tol: f64,
    pub symmetry_tol: f64,
    /// Acceptance threshold for re-checked identities and witnesses.
    pub witness_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_rel_tol: 1e-10,
            symmetry_tol: 1e-12,
            witness_tol: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rel_tol: f64, symmetry_tol: f64, witness_tol: f64) -> Result<Self> {
        let t = Tolerance {
            rank_rel_tol,
            symmetry_tol,
            witness_tol,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.rank_rel_tol, self.symmetry_tol, self.witness_tol]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidTolerance)
        }
    }
}

/// A scalar field with the linear-algebra kernel used for decisions.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: ArithmeticMode;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
    fn to_f64(&self) -> f64;
    fn to_scalar(&self) -> Scalar;
    /// Converts a parsed scalar into this field. Floats convert to
    /// rationals exactly (every finite double is dyadic).
    fn from_scalar(s: &Scalar) -> Option<Self>;
    /// Zero test: exact equality for exact fields, `|x| <= tol` otherwise.
    fn within(&self, tol: f64) -> bool;
    fn abs(&self) -> Self;

    /// Rank. For floats the threshold is `rank_rel_tol * max(sigma_max, scale)`.
    fn rank_scaled(m: &Mat<Self>, tol: &Tolerance, scale: f64) -> Result<usize>;
    /// Kernel basis as columns (orthonormal for floats).
    fn null_space(m: &Mat<Self>, tol: &Tolerance) -> Result<Mat<Self>> {
        Self::null_space_scaled(m, tol, 0.0)
    }
    /// Kernel basis with the same thresholding rule as [`Field::rank_scaled`].
    fn null_space_scaled(m: &Mat<Self>, tol: &Tolerance, scale: f64) -> Result<Mat<Self>>;
    /// Basis of the column space as columns (orthonormal for floats, a
    /// subset of the input columns for exact fields).
    fn column_basis(m: &Mat<Self>, tol: &Tolerance) -> Result<Mat<Self>>;
    /// Orthogonal projection onto the column space.
    fn projection(a: &Mat<Self>, tol: &Tolerance) -> Result<Mat<Self>>;
    /// Some solution of `a x = b`, or `None` if inconsistent.
    fn solve(a: &Mat<Self>, b: &[Self], tol: &Tolerance) -> Result<Option<Vec<Self>>>;
    fn inverse(m: &Mat<Self>, tol: &Tolerance) -> Result<Option<Mat<Self>>>;
}

impl Field for f64 {
    const MODE: ArithmeticMode = ArithmeticMode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Float(*self)
    }
    fn from_scalar(s: &Scalar) -> Option<Self> {
        Some(s.to_f64())
    }
    fn within(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn rank_scaled(m: &Mat<f64>, tol: &Tolerance, scale: f64) -> Result<usize> {
        Ok(float::rank(m, tol, scale))
    }
    fn null_space_scaled(m: &Mat<f64>, tol: &Tolerance, scale: f64) -> Result<Mat<f64>> {
        Ok(float::null_space(m, tol, scale))
    }
    fn column_basis(m: &Mat<f64>, tol: &Tolerance) -> Result<Mat<f64>> {
        Ok(float::column_basis(m, tol))
    }
    fn projection(a: &Mat<f64>, tol: &Tolerance) -> Result<Mat<f64>> {
        let u = float::column_basis(a, tol);
        let p = &u * &u.transpose();
        let n = p.rows();
        Ok(Mat::from_fn(n, n, |i, j| 0.5 * (p[(i, j)] + p[(j, i)])))
    }
    fn solve(a: &Mat<f64>, b: &[f64], tol: &Tolerance) -> Result<Option<Vec<f64>>> {
        Ok(float::solve(a, b, tol))
    }
    fn inverse(m: &Mat<f64>, tol: &Tolerance) -> Result<Option<Mat<f64>>> {
        Ok(float::inverse(m, tol))
    }
}

impl Field for Rational {
    const MODE: ArithmeticMode = ArithmeticMode::Exact;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Exact(self.clone())
    }
    fn from_scalar(s: &Scalar) -> Option<Self> {
        match s {
            Scalar::Exact(r) => Some(r.clone()),
            Scalar::Float(f) => Rational::from_float(*f),
        }
    }
    fn within(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn rank_scaled(m: &Mat<Rational>, _tol: &Tolerance, _scale: f64) -> Result<usize> {
        exact::rank(m)
    }
    fn null_space_scaled(
        m: &Mat<Rational>,
        _tol: &Tolerance,
        _scale: f64,
    ) -> Result<Mat<Rational>> {
        exact::null_space(m)
    }
    fn column_basis(m: &Mat<Rational>, _tol: &Tolerance) -> Result<Mat<Rational>> {
        Ok(m.select_columns(&exact::pivot_columns(m)?))
    }
    fn projection(a: &Mat<Rational>, _tol: &Tolerance) -> Result<Mat<Rational>> {
        exact::projection(a)
    }
    fn solve(a: &Mat<Rational>, b: &[Rational], _tol: &Tolerance) -> Result<Option<Vec<Rational>>> {
        exact::solve(a, b)
    }
    fn inverse(m: &Mat<Rational>, _tol: &Tolerance) -> Result<Option<Mat<Rational>>> {
        exact::inverse(m)
    }
}

/// Rank: exact elimination or singular values above `rank_rel_tol * sigma_max`.
pub fn rank<T: Field>(m: &Mat<T>, tol: &Tolerance) -> Result<usize> {
    T::rank_scaled(m, tol, 0.0)
}

/// Kernel basis; `cols - rank` columns, orthonormal in float mode.
pub fn null_space_basis<T: Field>(m: &Mat<T>, tol: &Tolerance) -> Result<Mat<T>> {
    T::null_space(m, tol)
}

/// Orthogonal projection onto the column space of `a`; dependent columns are
/// pruned first.
pub fn projection_onto_colspace<T: Field>(a: &Mat<T>, tol: &Tolerance) -> Result<Mat<T>> {
    T::projection(a, tol)
}

/// Greedy (index order) maximal independent subset of the given vectors.
pub fn greedy_independent<T: Field>(
    vectors: &[Vec<T>],
    dim: usize,
    tol: &Tolerance,
) -> Result<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..vectors.len() {
        let mut trial: Vec<Vec<T>> = chosen.iter().map(|&k| vectors[k].clone()).collect();
        trial.push(vectors[i].clone());
        let m = Mat::from_columns(&trial, dim)?;
        if rank(&m, tol)? == trial.len() {
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests;
