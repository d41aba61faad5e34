//! Invertible operators and projections acting on frames.

use rand::Rng;
use rayon::prelude::*;

use crate::certificate::{matrix_rows, Certificate, Method, Verdict, Witness, WitnessPair};
use crate::error::{Error, Result};
use crate::falsifier::pr_witness_from_partition;
use crate::frame::Frame;
use crate::linalg::{
    self, greedy_independent, norm_sq, outer, singular_values, ArithmeticMode, Field, Mat,
    Tolerance,
};
use crate::random;
use crate::scalar::Scalar;
use crate::spark::yields_phase_retrieval_vectors;
use crate::subspace::Subspace;

/// An invertible `N x N` matrix with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct InvertibleOperator<T: Field> {
    matrix: Mat<T>,
    inverse: Mat<T>,
    condition_estimate: f64,
}

fn condition(m: &Mat<f64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

impl<T: Field> InvertibleOperator<T> {
    pub fn new(matrix: Mat<T>, tol: &Tolerance) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                got: matrix.cols(),
            });
        }
        let inverse = T::inverse(&matrix, tol)?.ok_or(Error::Singular)?;
        Ok(Self::with_inverse(matrix, inverse))
    }

    fn with_inverse(matrix: Mat<T>, inverse: Mat<T>) -> Self {
        let condition_estimate = condition(&matrix.to_f64());
        InvertibleOperator {
            matrix,
            inverse,
            condition_estimate,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::with_inverse(Mat::identity(n), Mat::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.matrix
    }

    pub fn inverse(&self) -> &Mat<T> {
        &self.inverse
    }

    /// `T⁻ᵀ`, the operator whose frame images keep the measurements of
    /// `Tx` equal to those of `x`.
    pub fn inverse_transpose(&self) -> Mat<T> {
        self.inverse.transpose()
    }

    /// `σmax / σmin`
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.matrix.mul_vec(v)
    }

    /// `max |T T⁻¹ - I|`
    pub fn inverse_residual(&self) -> f64 {
        (&self.matrix * &self.inverse).max_abs_diff(&Mat::identity(self.dim()))
    }
}

/// `{Tφᵢ}`
pub fn apply_operator<T: Field>(f: &Frame<T>, t: &InvertibleOperator<T>) -> Result<Frame<T>> {
    f.map_vectors(t.matrix())
}

/// `{Pφᵢ}` written in the coordinates of the orthonormal basis of
/// `range(P)`, i.e. a frame for `R^k` with `k = dim P`.
pub fn project_frame<T: Field>(f: &Frame<T>, p: &Subspace<T>) -> Result<Frame<f64>> {
    if p.ambient_dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: p.ambient_dim(),
        });
    }
    if p.dim() == 0 {
        return Err(Error::NotAProjectionTarget);
    }
    let u = p.to_float().basis().transpose();
    f.to_float().map_vectors(&u)
}

/// Fixes `direction` and halves everything orthogonal to it:
/// `T = D + ½(I - D)` with `D` the projection onto the direction, so
/// `T⁻¹ = 2I - D`. Exact for rational directions.
pub fn shrink_operator<T: Field>(direction: &[T]) -> Result<InvertibleOperator<T>> {
    let len = norm_sq(direction);
    if len.is_zero() {
        return Err(Error::ZeroVector);
    }
    let n = direction.len();
    let d = outer(direction, direction).scale(&(T::one() / len));
    let id = Mat::<T>::identity(n);
    let half = T::from_ratio(1, 2);
    let matrix = &d + &(&id - &d).scale(&half);
    let inverse = &id.scale(&T::from_i64(2)) - &d;
    Ok(InvertibleOperator::with_inverse(matrix, inverse))
}

/// Operator sending the first (greedy by index) basis inside the frame to
/// the standard basis, so the transformed frame contains an orthonormal
/// basis and does norm retrieval. Returns the operator and the chosen
/// indices.
pub fn nr_inducing_operator<T: Field>(
    f: &Frame<T>,
    tol: &Tolerance,
) -> Result<(InvertibleOperator<T>, Vec<usize>)> {
    let chosen = greedy_independent(f.vectors(), f.dim(), tol)?;
    if chosen.len() < f.dim() {
        return Err(Error::NotAFrame);
    }
    let a = f.columns_of(&chosen);
    let inv = T::inverse(&a, tol)?.ok_or(Error::NotAFrame)?;
    Ok((InvertibleOperator::with_inverse(inv, a), chosen))
}

const MAX_OPERATOR_DRAWS: usize = 10_000;

/// Gaussian operator with condition number at most `cond_cap`, resampled
/// until it qualifies. Deterministic in `seed`.
pub fn random_invertible(
    n: usize,
    seed: u64,
    cond_cap: f64,
    tol: &Tolerance,
) -> Result<InvertibleOperator<f64>> {
    if cond_cap.is_nan() || cond_cap <= 1.0 || n == 0 {
        return Err(Error::RangeError(format!(
            "need n > 0 and cond_cap > 1, got n = {n}, cond_cap = {cond_cap}"
        )));
    }
    let mut rng = random::rng(seed);
    for _ in 0..MAX_OPERATOR_DRAWS {
        let m = random::gaussian_matrix(n, n, &mut rng);
        if condition(&m) > cond_cap {
            continue;
        }
        if let Ok(op) = InvertibleOperator::new(m, tol) {
            if op.inverse_residual() <= tol.witness_tol * op.condition_estimate.max(1.0) {
                return Ok(op);
            }
        }
    }
    Err(Error::ResampleExhausted(MAX_OPERATOR_DRAWS))
}

/// Invertible matrix with small rational entries.
pub fn random_invertible_rational<R: Rng>(
    n: usize,
    rng: &mut R,
    tol: &Tolerance,
) -> InvertibleOperator<linalg::Rational> {
    loop {
        if let Ok(op) = InvertibleOperator::new(random::rational_matrix(n, n, rng), tol) {
            return op;
        }
    }
}

/// Random operator in the frame's arithmetic: rational entries for exact
/// frames, a well-conditioned Gaussian matrix for float frames.
fn trial_operator<T: Field>(n: usize, seed: u64, tol: &Tolerance) -> Result<InvertibleOperator<T>> {
    let matrix: Mat<T> = match T::MODE {
        ArithmeticMode::Exact => {
            let op = random_invertible_rational(n, &mut random::rng(seed), tol);
            Mat::from_fn(n, n, |i, j| {
                lift(Scalar::Exact(op.matrix()[(i, j)].clone()))
            })
        }
        ArithmeticMode::Float => {
            let op = random_invertible(n, seed, 100.0, tol)?;
            Mat::from_fn(n, n, |i, j| lift(Scalar::Float(op.matrix()[(i, j)])))
        }
    };
    InvertibleOperator::new(matrix, tol)
}

fn lift<T: Field>(s: Scalar) -> T {
    T::from_scalar(&s).expect("finite scalar")
}

/// Concrete failure of norm retrieval after an invertible change: the frame
/// `{T⁻ᵀφᵢ}` sees `Tx` and `Ty` identically, yet their norms differ.
#[derive(Clone, Debug)]
pub struct NormRetrievalFailure<T: Field> {
    pub signal_operator: InvertibleOperator<T>,
    pub transformed: Frame<T>,
    pub pair: WitnessPair<T>,
    /// The original pair already had different norms, so `T = I`.
    pub unshrunk: bool,
}

impl<T: Field> NormRetrievalFailure<T> {
    pub fn witness(&self) -> Witness {
        Witness::Operator {
            frame_operator: matrix_rows(&self.signal_operator.inverse_transpose()),
            signal_operator: matrix_rows(self.signal_operator.matrix()),
            pair: self.pair.payload(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport<T: Field> {
    pub ground_truth: Certificate,
    pub trials: usize,
    pub preserved: usize,
    pub mismatched_trials: Vec<usize>,
    pub counterexample: Option<NormRetrievalFailure<T>>,
}

impl<T: Field> EquivalenceReport<T> {
    /// The ground-truth verdict when every trial agreed, `UNKNOWN`
    /// otherwise.
    pub fn certificate(&self) -> Certificate {
        let verdict = if self.mismatched_trials.is_empty() {
            self.ground_truth.verdict
        } else {
            Verdict::Unknown
        };
        Certificate::new(verdict, Method::InvertibleEquivalence, T::MODE).with_witness(
            Witness::Suite {
                ground_truth: self.ground_truth.verdict,
                trials: self.trials,
                preserved: self.preserved,
                mismatched_trials: self.mismatched_trials.clone(),
                counterexample: self.counterexample.as_ref().map(|c| Box::new(c.witness())),
            },
        )
    }
}

/// Builds the norm retrieval failure from a phase retrieval violation
/// `(x, y)`: if the norms differ the frame itself fails; otherwise shrink
/// about `x`, which keeps `‖Tx‖ = ‖x‖` and strictly shrinks `Ty` because `y`
/// is not parallel to `x`.
pub fn norm_retrieval_failure<T: Field>(
    f: &Frame<T>,
    pair: &WitnessPair<T>,
    tol: &Tolerance,
) -> Result<NormRetrievalFailure<T>> {
    let norms_differ = !(norm_sq(&pair.x) - norm_sq(&pair.y)).within(tol.witness_tol);
    let t = if norms_differ {
        InvertibleOperator::identity(f.dim())
    } else {
        shrink_operator(&pair.x)?
    };
    let transformed = f.map_vectors(&t.inverse_transpose())?;
    let out = WitnessPair::for_frame(&transformed, t.apply(&pair.x), t.apply(&pair.y));
    Ok(NormRetrievalFailure {
        signal_operator: t,
        transformed,
        pair: out,
        unshrunk: norms_differ,
    })
}

/// Phase retrieval by vectors, retrieval after every invertible change, and
/// norm retrieval after every invertible change are equivalent. Checks the
/// first two on random operators (the complement property is invariant) and
/// makes the third constructive on `NO` instances.
pub fn invertible_equivalence_suite<T: Field>(
    f: &Frame<T>,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
    max_m: usize,
) -> Result<EquivalenceReport<T>> {
    let ground_truth = yields_phase_retrieval_vectors(f, tol, max_m)?;
    let outcomes: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let t = trial_operator::<T>(f.dim(), seed.wrapping_add(k as u64), tol)?;
            let c = yields_phase_retrieval_vectors(&apply_operator(f, &t)?, tol, max_m)?;
            Ok(c.verdict == ground_truth.verdict)
        })
        .collect::<Result<_>>()?;
    let mismatched_trials: Vec<usize> = (0..trials).filter(|&k| !outcomes[k]).collect();
    let counterexample = match &ground_truth.witness {
        Some(Witness::PartitionPair { subset, .. }) => {
            let pair = pr_witness_from_partition(f, subset, tol)?;
            Some(norm_retrieval_failure(f, &pair, tol)?)
        }
        _ => None,
    };
    Ok(EquivalenceReport {
        ground_truth,
        trials,
        preserved: trials - mismatched_trials.len(),
        mismatched_trials,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Rational;
    use crate::spark::{complement_property, DEFAULT_MAX_M};
    use crate::subspace::{norm_retrieval_certificate, SubspaceFamily};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn apply_examples() {
        let f: Frame<Rational> = Frame::from_ints(2, &[&[1, 0], &[0, 1]]).unwrap();
        let id = InvertibleOperator::identity(2);
        assert_eq!(apply_operator(&f, &id).unwrap(), f);
        let d = Mat::from_fn(2, 2, |i, j| {
            Rational::from_i64(if i != j {
                0
            } else if i == 0 {
                2
            } else {
                1
            })
        });
        let t = InvertibleOperator::new(d, &tol()).unwrap();
        let g = apply_operator(&f, &t).unwrap();
        assert_eq!(g, Frame::from_ints(2, &[&[2, 0], &[0, 1]]).unwrap());
        assert!(g.report(&tol()).unwrap().is_frame);
    }

    #[test]
    fn singular_rejected() {
        let z = Mat::<f64>::zeros(2, 2);
        assert_eq!(InvertibleOperator::new(z, &tol()), Err(Error::Singular));
    }

    #[test]
    fn shrink_examples() {
        let e1 = vec![Rational::from_i64(1), Rational::from_i64(0)];
        let t = shrink_operator(&e1).unwrap();
        let expected = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Rational::from_i64(1),
            (1, 1) => Rational::from_ratio(1, 2),
            _ => Rational::from_i64(0),
        });
        assert_eq!(t.matrix(), &expected);
        assert_eq!(t.apply(&e1), e1);
        let e2 = vec![Rational::from_i64(0), Rational::from_i64(1)];
        assert_eq!(norm_sq(&t.apply(&e2)), Rational::from_ratio(1, 4));
        assert_eq!(t.inverse_residual(), 0.0);
        assert_eq!(shrink_operator::<f64>(&[0.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn shrink_norm_identity_on_random_vectors() {
        let mut rng = random::rng(1);
        for _ in 0..50 {
            let d = random::gaussian_vector(4, &mut rng);
            let x = random::gaussian_vector(4, &mut rng);
            let t = shrink_operator(&d).unwrap();
            let e = linalg::scale_vec(&d, &(1.0 / linalg::norm_f64(&d)));
            let c = linalg::dot(&x, &e);
            let expected = c * c + 0.25 * (linalg::dot(&x, &x) - c * c);
            assert!((norm_sq(&t.apply(&x)) - expected).abs() <= 1e-10);
        }
    }

    #[test]
    fn projection_examples() {
        let f: Frame<f64> =
            Frame::from_ints(2, &[&[1, 0], &[0, 1], &[1, 1], &[1, -1], &[1, 3]]).unwrap();
        let full = Subspace::from_matrix(&Mat::identity(2), &tol()).unwrap();
        let same = project_frame(&f, &full).unwrap();
        assert_eq!(same.len(), 5);
        assert!(same.gram_matrix().max_abs_diff(&f.gram_matrix()) < 1e-12);
        let line = Subspace::from_spanning(2, &[vec![1.0, 0.0]], &tol()).unwrap();
        let p = project_frame(&f, &line).unwrap();
        assert_eq!(p.dim(), 1);
        assert!(p.vectors().iter().any(|v| v[0].abs() > 0.5));
        assert!(yields_phase_retrieval_vectors(&p, &tol(), DEFAULT_MAX_M)
            .unwrap()
            .is_yes());
        assert_eq!(
            project_frame(&f, &Subspace::zero(2)),
            Err(Error::NotAProjectionTarget)
        );
    }

    #[test]
    fn inducing_operator_examples() {
        let f: Frame<Rational> = Frame::from_ints(2, &[&[1, 0], &[1, 0], &[0, 1]]).unwrap();
        let (t, chosen) = nr_inducing_operator(&f, &tol()).unwrap();
        assert_eq!(chosen, vec![0, 2]);
        assert_eq!(t.matrix(), &Mat::identity(2));
        let f: Frame<Rational> = Frame::from_ints(2, &[&[1, 1], &[1, -1], &[2, 0]]).unwrap();
        let (t, chosen) = nr_inducing_operator(&f, &tol()).unwrap();
        assert_eq!(chosen, vec![0, 1]);
        let g = apply_operator(&f, &t).unwrap();
        assert_eq!(g.vector(0), &[Rational::from_i64(1), Rational::from_i64(0)]);
        let fam = SubspaceFamily::rank_one(&g, &tol()).unwrap();
        let c = norm_retrieval_certificate(&fam, &tol()).unwrap();
        assert_eq!(
            (c.verdict, c.method),
            (Verdict::Yes, Method::IdentityInSpan)
        );
        let bad: Frame<f64> = Frame::from_ints(2, &[&[1, 0], &[2, 0]]).unwrap();
        assert!(matches!(
            nr_inducing_operator(&bad, &tol()),
            Err(Error::NotAFrame)
        ));
    }

    #[test]
    fn random_operators() {
        let a = random_invertible(3, 9, 100.0, &tol()).unwrap();
        let b = random_invertible(3, 9, 100.0, &tol()).unwrap();
        assert_eq!(a, b);
        assert!(a.condition_estimate() <= 100.0);
        let one = random_invertible(1, 2, 10.0, &tol()).unwrap();
        assert!(one.matrix()[(0, 0)] != 0.0);
        assert!(random_invertible(2, 0, 1.0, &tol()).is_err());
    }

    #[test]
    fn cp_invariance_under_operators() {
        let f: Frame<Rational> = Frame::from_ints(2, &[&[1, 0], &[0, 1], &[1, 1]]).unwrap();
        let before = complement_property(&f, &tol(), DEFAULT_MAX_M)
            .unwrap()
            .verdict;
        let mut rng = random::rng(3);
        for _ in 0..20 {
            let t = random_invertible_rational(2, &mut rng, &tol());
            let after =
                complement_property(&apply_operator(&f, &t).unwrap(), &tol(), DEFAULT_MAX_M)
                    .unwrap()
                    .verdict;
            assert_eq!(before, after);
        }
    }

    #[test]
    fn suite_on_basis_builds_failure() {
        let f: Frame<Rational> = Frame::from_ints(2, &[&[1, 0], &[0, 1]]).unwrap();
        let r = invertible_equivalence_suite(&f, 5, 0, &tol(), DEFAULT_MAX_M).unwrap();
        assert_eq!(r.ground_truth.verdict, Verdict::No);
        assert_eq!(r.preserved, 5);
        let c = r.counterexample.expect("constructive failure");
        assert!(!c.unshrunk);
        assert!(c.pair.frame_measurements_match(&c.transformed, 0.0));
        assert!(c.pair.norm_gap >= 1e-6);
    }

    #[test]
    fn suite_with_no_trials() {
        let f: Frame<f64> = Frame::from_ints(2, &[&[1, 0], &[0, 1], &[1, 1]]).unwrap();
        let r = invertible_equivalence_suite(&f, 0, 0, &tol(), DEFAULT_MAX_M).unwrap();
        assert_eq!((r.trials, r.preserved), (0, 0));
        assert_eq!(r.certificate().verdict, Verdict::Yes);
    }
}
