//! Finite frames and their analysis, synthesis and frame operators.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm_f64, ArithmeticMode, Field, Mat, Tolerance};

/// Max-norm threshold on `S - I` for calling a float frame Parseval.
pub const PARSEVAL_TOL: f64 = 1e-8;

/// An ordered family of vectors in an `dim`-dimensional real space.
#[derive(Clone, Debug)]
pub struct Frame<T: Field> {
    dim: usize,
    vectors: Vec<Vec<T>>,
    operator: OnceLock<Mat<T>>,
}

impl<T: Field> PartialEq for Frame<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vectors == other.vectors
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub is_frame: bool,
    pub is_tight: bool,
    pub is_parseval: bool,
}

impl<T: Field> Frame<T> {
    pub fn new(dim: usize, vectors: Vec<Vec<T>>) -> Result<Self> {
        if vectors.is_empty() || dim == 0 {
            return Err(Error::EmptyFrame);
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        Ok(Frame {
            dim,
            vectors,
            operator: OnceLock::new(),
        })
    }

    /// Parses integers and `p/q` literals; handy for tests and examples.
    pub fn from_ratios(dim: usize, vectors: &[&[(i64, i64)]]) -> Result<Self> {
        Self::new(
            dim,
            vectors
                .iter()
                .map(|v| v.iter().map(|&(p, q)| T::from_ratio(p, q)).collect())
                .collect(),
        )
    }

    pub fn from_ints(dim: usize, vectors: &[&[i64]]) -> Result<Self> {
        Self::new(
            dim,
            vectors
                .iter()
                .map(|v| v.iter().map(|&p| T::from_i64(p)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of vectors `M`.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<T>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[T] {
        &self.vectors[i]
    }

    pub fn mode(&self) -> ArithmeticMode {
        T::MODE
    }

    /// `N x M` matrix whose columns are the frame vectors.
    pub fn synthesis_matrix(&self) -> Mat<T> {
        Mat::from_columns(&self.vectors, self.dim).expect("validated at construction")
    }

    /// `M x N` matrix whose rows are the frame vectors.
    pub fn analysis_matrix(&self) -> Mat<T> {
        Mat::from_rows(&self.vectors, self.dim).expect("validated at construction")
    }

    /// Synthesis matrix restricted to `indices`.
    pub fn columns_of(&self, indices: &[usize]) -> Mat<T> {
        Mat::from_fn(self.dim, indices.len(), |i, j| {
            self.vectors[indices[j]][i].clone()
        })
    }

    pub fn analysis_apply(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_dim(x.len())?;
        Ok(self.vectors.iter().map(|v| dot(x, v)).collect())
    }

    pub fn synthesis_apply(&self, a: &[T]) -> Result<Vec<T>> {
        if a.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: a.len(),
            });
        }
        let mut out = vec![T::zero(); self.dim];
        for (coef, v) in a.iter().zip(&self.vectors) {
            if coef.is_zero() {
                continue;
            }
            for (o, vi) in out.iter_mut().zip(v) {
                *o = o.clone() + coef.clone() * vi.clone();
            }
        }
        Ok(out)
    }

    /// `S = Σ φᵢφᵢᵀ`, computed once and cached.
    pub fn frame_operator(&self) -> &Mat<T> {
        self.operator.get_or_init(|| {
            let mut s = Mat::<T>::zeros(self.dim, self.dim);
            for v in &self.vectors {
                for i in 0..self.dim {
                    if v[i].is_zero() {
                        continue;
                    }
                    for j in 0..self.dim {
                        s[(i, j)] = s[(i, j)].clone() + v[i].clone() * v[j].clone();
                    }
                }
            }
            s
        })
    }

    /// `M x M` matrix of inner products between frame vectors.
    pub fn gram_matrix(&self) -> Mat<T> {
        let m = self.len();
        Mat::from_fn(m, m, |i, j| dot(&self.vectors[i], &self.vectors[j]))
    }

    /// Largest singular value of the synthesis matrix, used to scale float
    /// rank thresholds of subfamilies.
    pub fn scale(&self) -> f64 {
        linalg::singular_values(&self.synthesis_matrix().to_f64())
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    /// Rank of the subfamily at `indices`, thresholded against the whole
    /// frame's scale in float mode.
    pub fn subset_rank(&self, indices: &[usize], tol: &Tolerance) -> Result<usize> {
        self.subset_rank_scaled(indices, tol, self.scale())
    }

    pub(crate) fn subset_rank_scaled(
        &self,
        indices: &[usize],
        tol: &Tolerance,
        scale: f64,
    ) -> Result<usize> {
        if indices.is_empty() {
            return Ok(0);
        }
        T::rank_scaled(&self.columns_of(indices), tol, scale)
    }

    pub fn is_spanning(&self, tol: &Tolerance) -> Result<bool> {
        Ok(linalg::rank(&self.synthesis_matrix(), tol)? == self.dim)
    }

    /// `max |S - I|`.
    pub fn parseval_residual(&self) -> f64 {
        self.frame_operator().max_abs_diff(&Mat::identity(self.dim))
    }

    /// Exact equality `S = I` for exact frames, `max |S - I| <= 1e-8` for floats.
    pub fn is_parseval(&self) -> bool {
        self.frame_operator()
            .approx_eq(&Mat::identity(self.dim), PARSEVAL_TOL)
    }

    pub(crate) fn require_parseval(&self) -> Result<()> {
        if self.is_parseval() {
            Ok(())
        } else {
            Err(Error::NotParseval(self.parseval_residual()))
        }
    }

    /// Optimal frame bounds and the frame / tight / Parseval flags.
    pub fn report(&self, tol: &Tolerance) -> Result<FrameReport> {
        let s = self.frame_operator().to_f64();
        let (values, _) = linalg::symmetric_eigen(&s, tol)?;
        let upper = values.first().copied().unwrap_or(0.0).max(0.0);
        let lower = values.last().copied().unwrap_or(0.0).max(0.0);
        let is_frame = match T::MODE {
            ArithmeticMode::Exact => self.is_spanning(tol)?,
            ArithmeticMode::Float => upper > 0.0 && lower > tol.rank_rel_tol * upper,
        };
        let is_parseval = is_frame && self.is_parseval();
        let is_tight = is_frame && (is_parseval || (upper - lower).abs() <= PARSEVAL_TOL * upper);
        Ok(FrameReport {
            lower_bound: lower,
            upper_bound: upper,
            is_frame,
            is_tight,
            is_parseval,
        })
    }

    /// The image of every vector under `op`.
    pub fn map_vectors(&self, op: &Mat<T>) -> Result<Frame<T>> {
        if op.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: op.cols(),
            });
        }
        Frame::new(
            op.rows(),
            self.vectors.iter().map(|v| op.mul_vec(v)).collect(),
        )
    }

    pub fn select(&self, indices: &[usize]) -> Result<Frame<T>> {
        Frame::new(
            self.dim,
            indices.iter().map(|&i| self.vectors[i].clone()).collect(),
        )
    }

    pub fn to_float(&self) -> Frame<f64> {
        Frame::new(
            self.dim,
            self.vectors
                .iter()
                .map(|v| v.iter().map(Field::to_f64).collect())
                .collect(),
        )
        .expect("same shape")
    }

    /// `{S^{-1/2} φᵢ}`, always in float arithmetic.
    pub fn canonical_parseval(&self, tol: &Tolerance) -> Result<Frame<f64>> {
        let f = self.to_float();
        let r = linalg::inv_sqrt_psd(f.frame_operator(), tol).map_err(|e| match e {
            Error::NotPositiveDefinite(_) => Error::NotAFrame,
            other => other,
        })?;
        f.map_vectors(&r)
    }

    /// Checks `x = Σ ⟨x, φᵢ⟩ φᵢ` for a Parseval frame.
    pub fn verify_reconstruction(&self, x: &[T], tol: &Tolerance) -> Result<bool> {
        self.require_parseval()?;
        let back = self.synthesis_apply(&self.analysis_apply(x)?)?;
        let err: Vec<T> = linalg::sub_vec(&back, x);
        Ok(match T::MODE {
            ArithmeticMode::Exact => err.iter().all(|e| e.is_zero()),
            ArithmeticMode::Float => {
                norm_f64(&err) <= tol.witness_tol * norm_f64(x).max(f64::MIN_POSITIVE)
            }
        })
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got,
            })
        } else {
            Ok(())
        }
    }
}
