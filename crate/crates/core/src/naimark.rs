//! Naimark complements of Parseval frames and the dualities between a frame
//! and its complement.
//!
//! If `{φᵢ}` is Parseval in `R^N` with `M` vectors, its analysis operator `T`
//! is an isometry onto a subspace with projection `P = TTᵀ` of `R^M`, and the
//! vectors `ψᵢ = (I - P)eᵢ`, written in coordinates of `range(I - P)`, form a
//! Parseval frame for `R^{M-N}`. Pairs are compared through Gram matrices:
//! `G_Φ + G_Ψ = I` is the basis-free contract.

use crate::certificate::{BoundsPayload, Certificate, Method, Verdict, Witness};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::{orthonormal_kernel_basis, ArithmeticMode, Field, Mat, Tolerance};
use crate::spark::{is_full_spark, yields_phase_retrieval_vectors};

#[derive(Clone, Debug, PartialEq)]
pub struct NaimarkPair<T: Field> {
    primary: Frame<T>,
    complement: Frame<T>,
}

impl<T: Field> NaimarkPair<T> {
    /// Pairs two frames with the same number of vectors; use
    /// [`verify_naimark_pair`] to check the complement relation.
    pub fn new(primary: Frame<T>, complement: Frame<T>) -> Result<Self> {
        if primary.len() != complement.len() {
            return Err(Error::DimensionMismatch {
                expected: primary.len(),
                got: complement.len(),
            });
        }
        Ok(NaimarkPair {
            primary,
            complement,
        })
    }

    pub fn primary(&self) -> &Frame<T> {
        &self.primary
    }

    pub fn complement(&self) -> &Frame<T> {
        &self.complement
    }

    /// The same pair seen from the complement's side.
    pub fn swapped(&self) -> Self {
        NaimarkPair {
            primary: self.complement.clone(),
            complement: self.primary.clone(),
        }
    }

    /// `max |G_Φ + G_Ψ - I|`
    pub fn gram_residual(&self) -> f64 {
        let sum = &self.primary.gram_matrix() + &self.complement.gram_matrix();
        sum.max_abs_diff(&Mat::identity(self.primary.len()))
    }

    pub fn to_float(&self) -> NaimarkPair<f64> {
        NaimarkPair {
            primary: self.primary.to_float(),
            complement: self.complement.to_float(),
        }
    }
}

/// Complement frame from the rows of a canonical orthonormal basis of
/// `ker Tᵀ`. Always computed in float arithmetic (an orthonormal basis of a
/// rational subspace is generally irrational); the Parseval check runs in
/// the input's own arithmetic.
pub fn naimark_complement<T: Field>(f: &Frame<T>, tol: &Tolerance) -> Result<NaimarkPair<f64>> {
    f.require_parseval()?;
    let (n, m) = (f.dim(), f.len());
    if m == n {
        return Err(Error::NoComplement);
    }
    let primary = f.to_float();
    let basis = orthonormal_kernel_basis(&primary.synthesis_matrix(), tol);
    if basis.cols() != m - n {
        return Err(Error::NotParseval(primary.parseval_residual()));
    }
    let complement = Frame::new(m - n, basis.row_vecs())?;
    NaimarkPair::new(primary, complement)
}

/// Both frames Parseval and `G_Φ + G_Ψ = I` (exactly, or within
/// `witness_tol` in float mode).
pub fn verify_naimark_pair<T: Field>(p: &NaimarkPair<T>, tol: &Tolerance) -> bool {
    let gram_ok = match T::MODE {
        ArithmeticMode::Exact => p.gram_residual() == 0.0,
        ArithmeticMode::Float => p.gram_residual() <= tol.witness_tol,
    };
    p.primary.is_parseval() && p.complement.is_parseval() && gram_ok
}

fn split(subset: &[usize], m: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut inside = subset.to_vec();
    inside.sort_unstable();
    inside.dedup();
    if let Some(&bad) = inside.iter().find(|&&i| i >= m) {
        return Err(Error::RangeError(format!(
            "index {bad} out of range for {m} vectors"
        )));
    }
    let outside = (0..m)
        .filter(|i| inside.binary_search(i).is_err())
        .collect();
    Ok((inside, outside))
}

/// `{φᵢ}_I` independent exactly when `{ψᵢ}_{Iᶜ}` spans `R^{M-N}`. Returns
/// whether the two sides agree.
pub fn independence_spanning_duality<T: Field>(
    pair: &NaimarkPair<T>,
    subset: &[usize],
    tol: &Tolerance,
) -> Result<bool> {
    let (inside, outside) = split(subset, pair.primary.len())?;
    let independent = pair.primary.subset_rank(&inside, tol)? == inside.len();
    let spans = pair.complement.subset_rank(&outside, tol)? == pair.complement.dim();
    Ok(independent == spans)
}

/// Projection form: `{Peᵢ}_I` independent exactly when `{(I-P)eᵢ}_{Iᶜ}`
/// spans `range(I - P)`, for an orthogonal projection `P` of `R^M`.
pub fn projection_duality<T: Field>(p: &Mat<T>, subset: &[usize], tol: &Tolerance) -> Result<bool> {
    let m = p.rows();
    let (inside, outside) = split(subset, m)?;
    let q = &Mat::identity(m) - p;
    let rank = |a: &Mat<T>| T::rank_scaled(a, tol, 1.0);
    let independent = inside.is_empty() || rank(&p.select_columns(&inside))? == inside.len();
    let target = rank(&q)?;
    let spans = if outside.is_empty() {
        target == 0
    } else {
        rank(&q.select_columns(&outside))? == target
    };
    Ok(independent == spans)
}

/// The duality for a Parseval frame via `P = TTᵀ`, which stays exact for
/// rational frames.
pub fn frame_duality<T: Field>(f: &Frame<T>, subset: &[usize], tol: &Tolerance) -> Result<bool> {
    f.require_parseval()?;
    let p = &f.analysis_matrix() * &f.synthesis_matrix();
    projection_duality(&p, subset, tol)
}

/// A Parseval frame is full spark exactly when its complement is.
pub fn full_spark_duality<T: Field>(
    pair: &NaimarkPair<T>,
    tol: &Tolerance,
    max_m: usize,
) -> Result<bool> {
    pair.primary.require_parseval()?;
    Ok(is_full_spark(&pair.primary, tol, max_m)? == is_full_spark(&pair.complement, tol, max_m)?)
}

/// If both the frame and its complement yield phase retrieval then
/// `2N - 1 <= M <= 2N + 1`. `NO` only when that implication fails; a false
/// hypothesis is reported in the witness with verdict `YES`.
pub fn naimark_pr_bounds<T: Field>(
    pair: &NaimarkPair<T>,
    tol: &Tolerance,
    max_m: usize,
) -> Result<Certificate> {
    pair.primary.require_parseval()?;
    let (n, m) = (pair.primary.dim(), pair.primary.len());
    let primary_pr = yields_phase_retrieval_vectors(&pair.primary, tol, max_m)?.verdict;
    let complement_pr = yields_phase_retrieval_vectors(&pair.complement, tol, max_m)?.verdict;
    let hypothesis_holds = primary_pr == Verdict::Yes && complement_pr == Verdict::Yes;
    let lower_bound_holds = 2 * n <= m + 1;
    let upper_bound_holds = m <= 2 * n + 1;
    let verdict = if hypothesis_holds && !(lower_bound_holds && upper_bound_holds) {
        Verdict::No
    } else {
        Verdict::Yes
    };
    let mut cert = Certificate::new(verdict, Method::NaimarkBounds, T::MODE).with_witness(
        Witness::Bounds(BoundsPayload {
            n,
            m,
            primary_pr,
            complement_pr,
            hypothesis_holds,
            lower_bound_holds,
            upper_bound_holds,
        }),
    );
    if !hypothesis_holds {
        cert = cert.with_detail("hypothesis fails: not both sides yield phase retrieval");
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Rational;
    use crate::random;
    use crate::spark::DEFAULT_MAX_M;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn small_parseval() -> Frame<f64> {
        let s = 0.5f64.sqrt();
        Frame::new(2, vec![vec![1.0, 0.0], vec![0.0, s], vec![0.0, s]]).unwrap()
    }

    #[test]
    fn complement_of_small_parseval_frame() {
        let p = naimark_complement(&small_parseval(), &tol()).unwrap();
        let s = 0.5f64.sqrt();
        let psi: Vec<f64> = p.complement().vectors().iter().map(|v| v[0]).collect();
        let expected = [0.0, s, -s];
        assert!(psi.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(verify_naimark_pair(&p, &tol()));
    }

    #[test]
    fn orthonormal_basis_has_no_complement() {
        let f: Frame<Rational> = Frame::from_ints(2, &[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(naimark_complement(&f, &tol()), Err(Error::NoComplement));
        let g: Frame<f64> = Frame::from_ints(2, &[&[1, 0], &[0, 1], &[1, 1]]).unwrap();
        assert!(matches!(
            naimark_complement(&g, &tol()),
            Err(Error::NotParseval(_))
        ));
    }

    #[test]
    fn random_full_spark_complement() {
        let mut rng = random::rng(11);
        let f = random::gaussian_frame(3, 5, &mut rng)
            .canonical_parseval(&tol())
            .unwrap();
        let p = naimark_complement(&f, &tol()).unwrap();
        assert!(verify_naimark_pair(&p, &tol()));
        let r = p.complement().report(&tol()).unwrap();
        assert!(r.is_parseval);
        assert_eq!(p.complement().dim(), 2);
    }

    #[test]
    fn permuted_complement_fails_and_rotated_complement_passes() {
        let mut rng = random::rng(2);
        let f = random::gaussian_frame(2, 4, &mut rng)
            .canonical_parseval(&tol())
            .unwrap();
        let p = naimark_complement(&f, &tol()).unwrap();
        let mut psi = p.complement().vectors().to_vec();
        psi.swap(0, 1);
        let permuted = NaimarkPair::new(f.clone(), Frame::new(2, psi).unwrap()).unwrap();
        assert!(!verify_naimark_pair(&permuted, &tol()));

        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rot = Mat::from_row_major(2, 2, vec![c, -s, s, c]).unwrap();
        let rotated = NaimarkPair::new(f, p.complement().map_vectors(&rot).unwrap()).unwrap();
        assert!(verify_naimark_pair(&rotated, &tol()));
    }

    #[test]
    fn exact_cayley_pairs_verify() {
        let mut rng = random::rng(4);
        for (n, m) in [(2, 3), (2, 5), (3, 6)] {
            let p = random::rational_naimark_pair(n, m, &mut rng);
            assert!(verify_naimark_pair(&p, &tol()));
            assert!(p.primary().is_parseval());
        }
    }

    #[test]
    fn duality_examples() {
        let f = small_parseval();
        let p = naimark_complement(&f, &tol()).unwrap();
        assert!(independence_spanning_duality(&p, &[], &tol()).unwrap());
        let dup: Frame<f64> =
            Frame::from_ints(3, &[&[1, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        let dp = dup.canonical_parseval(&tol()).unwrap();
        let pair = naimark_complement(&dp, &tol()).unwrap();
        assert!(independence_spanning_duality(&pair, &[0, 1], &tol()).unwrap());
        // The dependent pair forces the complement over the rest to fail.
        assert!(pair.complement().subset_rank(&[2, 3], &tol()).unwrap() < 1);
        assert!(frame_duality(&dp, &[0, 1], &tol()).unwrap());
    }

    #[test]
    fn exact_frame_duality_on_cayley_pairs() {
        let mut rng = random::rng(8);
        let p = random::rational_naimark_pair(2, 4, &mut rng);
        for mask in 0u32..16 {
            let subset: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
            assert!(independence_spanning_duality(&p, &subset, &tol()).unwrap());
            assert!(frame_duality(p.primary(), &subset, &tol()).unwrap());
        }
    }

    #[test]
    fn full_spark_duality_examples() {
        let mut rng = random::rng(9);
        let f = random::gaussian_frame(2, 5, &mut rng)
            .canonical_parseval(&tol())
            .unwrap();
        let p = naimark_complement(&f, &tol()).unwrap();
        assert!(is_full_spark(p.complement(), &tol(), DEFAULT_MAX_M).unwrap());
        assert!(full_spark_duality(&p, &tol(), DEFAULT_MAX_M).unwrap());

        let p = naimark_complement(&small_parseval(), &tol()).unwrap();
        assert!(p.complement().vectors()[0][0].abs() < 1e-12);
        assert!(!is_full_spark(p.complement(), &tol(), DEFAULT_MAX_M).unwrap());
        assert!(full_spark_duality(&p, &tol(), DEFAULT_MAX_M).unwrap());
    }

    #[test]
    fn double_complement_reproduces_gram() {
        let mut rng = random::rng(10);
        let f = random::gaussian_frame(3, 7, &mut rng)
            .canonical_parseval(&tol())
            .unwrap();
        let p = naimark_complement(&f, &tol()).unwrap();
        let back = naimark_complement(p.complement(), &tol()).unwrap();
        let diff = back
            .complement()
            .gram_matrix()
            .max_abs_diff(&f.gram_matrix());
        assert!(diff <= 1e-8);
    }

    #[test]
    fn bounds_examples() {
        let mut rng = random::rng(12);
        for (n, m) in [(3, 5), (3, 6), (3, 7)] {
            let f = random::gaussian_frame(n, m, &mut rng)
                .canonical_parseval(&tol())
                .unwrap();
            let p = naimark_complement(&f, &tol()).unwrap();
            let c = naimark_pr_bounds(&p, &tol(), DEFAULT_MAX_M).unwrap();
            assert_eq!(c.verdict, Verdict::Yes);
        }
        let f = random::gaussian_frame(2, 6, &mut rng)
            .canonical_parseval(&tol())
            .unwrap();
        let p = naimark_complement(&f, &tol()).unwrap();
        let c = naimark_pr_bounds(&p, &tol(), DEFAULT_MAX_M).unwrap();
        assert_eq!(c.verdict, Verdict::Yes);
        let Some(Witness::Bounds(b)) = c.witness else {
            panic!()
        };
        assert!(!b.hypothesis_holds && !b.upper_bound_holds);
        assert_eq!(b.complement_pr, Verdict::No);
    }
}
