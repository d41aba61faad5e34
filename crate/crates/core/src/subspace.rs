//! Subspaces, projection families and norm retrieval.
//!
//! A family `{Wᵢ}` with projections `Pᵢ` does norm retrieval when equal
//! measurements `‖Pᵢx‖ = ‖Pᵢy‖` force `‖x‖ = ‖y‖`. Three sufficient or
//! deciding conditions are implemented: the identity lying in the span of the
//! projections, the case where dimensions sum to `N` (decided by `ΣPᵢ = I`,
//! with a constructive counterexample otherwise), and `N` rank-one members
//! (decided by orthogonality).

use rand::Rng;
use serde::Serialize;

use crate::certificate::{scalars, Certificate, Method, Verdict, Witness, WitnessPair};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::{
    self, dot, inv_sqrt_psd, norm_f64, outer, scale_vec, sub_vec, ArithmeticMode, Field, Mat,
    Rational, Tolerance,
};
use crate::random;
use crate::scalar::Scalar;
use crate::spark::{is_full_spark, DEFAULT_MAX_M};

/// A subspace of `R^N` held as a basis and its orthogonal projection.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T: Field> {
    basis: Mat<T>,
    projection: Mat<T>,
}

impl<T: Field> Subspace<T> {
    /// Span of the columns of `a`; dependent columns are dropped.
    pub fn from_matrix(a: &Mat<T>, tol: &Tolerance) -> Result<Self> {
        let n = a.rows();
        if a.cols() == 0 {
            return Ok(Self::zero(n));
        }
        let basis = T::column_basis(a, tol)?;
        let projection = if basis.cols() == 0 {
            Mat::zeros(n, n)
        } else {
            T::projection(&basis, tol)?
        };
        Ok(Subspace { basis, projection })
    }

    pub fn from_spanning(ambient_dim: usize, vectors: &[Vec<T>], tol: &Tolerance) -> Result<Self> {
        if vectors.is_empty() {
            return Ok(Self::zero(ambient_dim));
        }
        Self::from_matrix(&Mat::from_columns(vectors, ambient_dim)?, tol)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            basis: Mat::zeros(ambient_dim, 0),
            projection: Mat::zeros(ambient_dim, ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.projection.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// `N x k` basis: orthonormal in float mode, spanning columns of the
    /// input in exact mode.
    pub fn basis(&self) -> &Mat<T> {
        &self.basis
    }

    pub fn projection(&self) -> &Mat<T> {
        &self.projection
    }

    /// `P x`
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.projection.mul_vec(x)
    }

    /// `‖P x‖² = xᵀ P x`
    pub fn measure(&self, x: &[T]) -> T {
        dot(x, &self.apply(x))
    }

    /// Orthogonal complement, with projection `I - P`.
    pub fn complement(&self, tol: &Tolerance) -> Result<Self> {
        let n = self.ambient_dim();
        let basis = if self.dim() == 0 {
            Mat::identity(n)
        } else {
            T::null_space(&self.basis.transpose(), tol)?
        };
        let projection = &Mat::identity(n) - &self.projection;
        Ok(Subspace { basis, projection })
    }

    pub fn to_float(&self) -> Subspace<f64> {
        let tol = Tolerance::default();
        Subspace {
            basis: f64::column_basis(&self.basis.to_f64(), &tol).expect("float"),
            projection: self.projection.to_f64(),
        }
    }
}

/// An ordered list of subspaces of a common `R^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceFamily<T: Field> {
    ambient_dim: usize,
    members: Vec<Subspace<T>>,
}

impl<T: Field> SubspaceFamily<T> {
    pub fn new(ambient_dim: usize, members: Vec<Subspace<T>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if let Some(s) = members.iter().find(|s| s.ambient_dim() != ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                got: s.ambient_dim(),
            });
        }
        Ok(SubspaceFamily {
            ambient_dim,
            members,
        })
    }

    /// One member per spanning list.
    pub fn from_spanning_sets(
        ambient_dim: usize,
        sets: &[Vec<Vec<T>>],
        tol: &Tolerance,
    ) -> Result<Self> {
        let members = sets
            .iter()
            .map(|vs| Subspace::from_spanning(ambient_dim, vs, tol))
            .collect::<Result<_>>()?;
        Self::new(ambient_dim, members)
    }

    /// Rank-one members spanned by each vector of a frame.
    pub fn rank_one(frame: &Frame<T>, tol: &Tolerance) -> Result<Self> {
        let sets: Vec<Vec<Vec<T>>> = frame.vectors().iter().map(|v| vec![v.clone()]).collect();
        Self::from_spanning_sets(frame.dim(), &sets, tol)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Subspace<T>] {
        &self.members
    }

    pub fn dims_sum(&self) -> usize {
        self.members.iter().map(Subspace::dim).sum()
    }

    pub fn projection_sum(&self) -> Mat<T> {
        let n = self.ambient_dim;
        self.members
            .iter()
            .fold(Mat::zeros(n, n), |acc, s| &acc + s.projection())
    }

    /// `Σ aᵢ Pᵢ`
    pub fn weighted_sum(&self, a: &[T]) -> Mat<T> {
        let n = self.ambient_dim;
        self.members
            .iter()
            .zip(a)
            .fold(Mat::zeros(n, n), |acc, (s, ai)| {
                &acc + &s.projection().scale(ai)
            })
    }

    pub fn has_zero_member(&self) -> bool {
        self.members.iter().any(|s| s.dim() == 0)
    }

    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            self.ambient_dim,
            indices.iter().map(|&i| self.members[i].clone()).collect(),
        )
    }

    pub fn to_float(&self) -> SubspaceFamily<f64> {
        SubspaceFamily {
            ambient_dim: self.ambient_dim,
            members: self.members.iter().map(Subspace::to_float).collect(),
        }
    }
}

/// `(‖Pᵢx‖²)ᵢ`
pub fn measurement_map<T: Field>(fam: &SubspaceFamily<T>, x: &[T]) -> Result<Vec<T>> {
    if x.len() != fam.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: fam.ambient_dim(),
            got: x.len(),
        });
    }
    Ok(fam.members().iter().map(|s| s.measure(x)).collect())
}

/// Coefficients `a` with `Σ aᵢ Pᵢ = I`, if any. Float solutions are
/// re-checked against `witness_tol` in the max norm.
pub fn identity_in_span<T: Field>(
    fam: &SubspaceFamily<T>,
    tol: &Tolerance,
) -> Result<Option<Vec<T>>> {
    let n = fam.ambient_dim();
    let columns: Vec<Vec<T>> = fam
        .members()
        .iter()
        .map(|s| s.projection().vectorize())
        .collect();
    let a = Mat::from_columns(&columns, n * n)?;
    let id = Mat::<T>::identity(n);
    let Some(coef) = T::solve(&a, &id.vectorize(), tol)? else {
        return Ok(None);
    };
    Ok(fam
        .weighted_sum(&coef)
        .approx_eq(&id, tol.witness_tol)
        .then_some(coef))
}

fn pairwise_orthogonal<T: Field>(fam: &SubspaceFamily<T>, tol: &Tolerance) -> bool {
    let ms = fam.members();
    (0..ms.len()).all(|i| {
        (i + 1..ms.len()).all(|j| {
            let prod = ms[i].projection() * ms[j].projection();
            prod.approx_eq(&Mat::zeros(prod.rows(), prod.cols()), tol.witness_tol)
        })
    })
}

/// Norm retrieval certificate from the decision cascade: identity in span,
/// then `N` rank-one members, then dimensions summing to `N`. Anything else
/// is `UNKNOWN`; use [`crate::falsifier::nr_violation_search`] to look for a
/// counterexample.
pub fn norm_retrieval_certificate<T: Field>(
    fam: &SubspaceFamily<T>,
    tol: &Tolerance,
) -> Result<Certificate> {
    let n = fam.ambient_dim();
    if let Some(a) = identity_in_span(fam, tol)? {
        return Ok(
            Certificate::new(Verdict::Yes, Method::IdentityInSpan, T::MODE).with_witness(
                Witness::Coefficients {
                    coefficients: scalars(&a),
                },
            ),
        );
    }
    let method = if fam.len() == n && fam.members().iter().all(|s| s.dim() == 1) {
        Method::Orthogonality
    } else if fam.dims_sum() == n {
        Method::SumProjectionsIdentity
    } else {
        return Ok(
            Certificate::new(Verdict::Unknown, Method::NoSufficientCondition, T::MODE)
                .with_detail("no finite test applies; run the optimization falsifier"),
        );
    };
    let decided_yes = match method {
        Method::Orthogonality => pairwise_orthogonal(fam, tol),
        _ => fam
            .projection_sum()
            .approx_eq(&Mat::identity(n), tol.witness_tol),
    };
    if decided_yes {
        return Ok(Certificate::new(Verdict::Yes, method, T::MODE));
    }
    // Zero members measure nothing, so a witness for the rest is a witness
    // for the whole family.
    let nonzero: Vec<usize> = (0..fam.len())
        .filter(|&i| fam.members()[i].dim() > 0)
        .collect();
    let pair = norm_retrieval_falsifier(&fam.select(&nonzero)?, tol)?;
    let pair = WitnessPair::for_family(fam, pair.x, pair.y);
    Ok(
        Certificate::new(Verdict::No, method, T::MODE).with_witness(Witness::Pair {
            pair: pair.payload(),
        }),
    )
}

fn score<T: Field>(q: &Mat<T>, z: &[T]) -> f64 {
    let qz = q.mul_vec(z);
    let nz = norm_f64(z);
    if nz == 0.0 {
        return 0.0;
    }
    norm_f64(&qz) * norm_f64(&sub_vec(z, &qz)) / (nz * nz)
}

fn admissible<T: Field>(q: &Mat<T>, z: &[T], tol: &Tolerance) -> bool {
    let qz = q.mul_vec(z);
    match T::MODE {
        ArithmeticMode::Exact => {
            qz.iter().any(|v| !v.is_zero()) && sub_vec(z, &qz).iter().any(|v| !v.is_zero())
        }
        ArithmeticMode::Float => score(q, z) > tol.witness_tol.sqrt(),
    }
}

fn normalized<T: Field>(z: Vec<T>) -> Vec<T> {
    if T::MODE == ArithmeticMode::Exact {
        return z;
    }
    let inv = T::from_scalar(&Scalar::Float(1.0 / norm_f64(&z))).expect("float field");
    scale_vec(&z, &inv)
}

/// Pick `z` in the columns of `zb` maximizing `‖Qz‖‖(I-Q)z‖`, falling back to
/// seeded integer combinations.
fn choose_z<T: Field>(q: &Mat<T>, zb: &Mat<T>, tol: &Tolerance) -> Option<Vec<T>> {
    let mut best: Option<(f64, Vec<T>)> = None;
    for z in zb.columns() {
        if !admissible(q, &z, tol) {
            continue;
        }
        let s = score(q, &z);
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, z));
        }
    }
    if let Some((_, z)) = best {
        return Some(normalized(z));
    }
    let k = zb.cols();
    let mut rng = random::rng(0);
    let combos = std::iter::once(vec![1i64; k])
        .chain((0..64).map(|_| (0..k).map(|_| rng.random_range(-3..=3)).collect()));
    for c in combos {
        let coef: Vec<T> = c.into_iter().map(T::from_i64).collect();
        let z = zb.mul_vec(&coef);
        if admissible(q, &z, tol) {
            return Some(normalized(z));
        }
    }
    None
}

/// Constructive counterexample to norm retrieval for a family with
/// `Σ dim Wᵢ = N` and `ΣPᵢ ≠ I`.
///
/// If the members do not span, returns `(x₀, 0)` with `x₀` orthogonal to all
/// of them. Otherwise picks the first `j` with `PⱼQ ≠ 0`, where `Q` projects
/// onto the span of the other members, takes `z ∈ Wⱼ` orthogonal to
/// `Wⱼ ∩ ker Q`, and returns `v₁ = Qz`, `v₂ = Qz + α(I-Q)z` with `α` chosen so
/// that `‖Pⱼv₁‖ = ‖Pⱼv₂‖`. The other members see `v₁` and `v₂` identically
/// because `(I-Q)z` is orthogonal to them. Exact on rational families.
pub fn norm_retrieval_falsifier<T: Field>(
    fam: &SubspaceFamily<T>,
    tol: &Tolerance,
) -> Result<WitnessPair<T>> {
    let n = fam.ambient_dim();
    if fam.has_zero_member() {
        return Err(Error::ZeroSubspace);
    }
    if fam.dims_sum() != n {
        return Err(Error::PreconditionViolated(format!(
            "dimensions sum to {}, not {n}",
            fam.dims_sum()
        )));
    }
    let id = Mat::<T>::identity(n);
    if fam.projection_sum().approx_eq(&id, tol.witness_tol) {
        return Err(Error::PreconditionViolated(
            "projections already sum to the identity".into(),
        ));
    }

    let all: Vec<Vec<T>> = fam
        .members()
        .iter()
        .flat_map(|s| s.basis().columns())
        .collect();
    let span = Mat::from_columns(&all, n)?;
    let perp = T::null_space(&span.transpose(), tol)?;
    if perp.cols() > 0 {
        let x0 = perp.column(0);
        return Ok(WitnessPair::for_family(fam, x0, vec![T::zero(); n]));
    }

    let others = |j: usize| -> Result<Mat<T>> {
        let cols: Vec<Vec<T>> = fam
            .members()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .flat_map(|(_, s)| s.basis().columns())
            .collect();
        if cols.is_empty() {
            return Ok(Mat::zeros(n, n));
        }
        T::projection(&Mat::from_columns(&cols, n)?, tol)
    };
    // Exact mode takes the first overlapping member; float mode the one with
    // the largest overlap (first on ties) for conditioning.
    let mut chosen: Option<(usize, Mat<T>, f64)> = None;
    for j in 0..fam.len() {
        let q = others(j)?;
        let overlap = (fam.members()[j].projection() * &q).max_abs();
        let nonzero = match T::MODE {
            ArithmeticMode::Exact => overlap > 0.0,
            ArithmeticMode::Float => overlap > tol.witness_tol,
        };
        if !nonzero {
            continue;
        }
        let better = chosen
            .as_ref()
            .is_none_or(|(_, _, best)| overlap > best * (1.0 + 1e-9));
        if better {
            chosen = Some((j, q, overlap));
        }
        if T::MODE == ArithmeticMode::Exact {
            break;
        }
    }
    let Some((j, q, _)) = chosen else {
        return Err(Error::PreconditionViolated(
            "members are mutually orthogonal".into(),
        ));
    };

    let wj = &fam.members()[j];
    let bj = wj.basis();
    let y_basis = bj * &T::null_space(&(&q * bj), tol)?;
    let z_basis = bj * &T::null_space(&(&y_basis.transpose() * bj), tol)?;
    let z = choose_z(&q, &z_basis, tol).ok_or_else(|| {
        Error::PreconditionViolated("no admissible direction in the chosen member".into())
    })?;

    let x = q.mul_vec(&z);
    let y = sub_vec(&z, &x);
    let pjx = wj.apply(&x);
    let pjy = wj.apply(&y);
    let denom = dot(&pjy, &pjy);
    let alpha = if denom.within(tol.witness_tol * tol.witness_tol) {
        T::one()
    } else {
        -(T::from_i64(2) * dot(&pjx, &y)) / denom
    };
    let v2 = linalg::add_vec(&x, &scale_vec(&y, &alpha));
    let pair = WitnessPair::for_family(fam, x, v2);
    if !pair.family_measurements_match(fam, tol.witness_tol) || pair.norm_gap == 0.0 {
        return Err(Error::PreconditionViolated(
            "construction lost precision".into(),
        ));
    }
    Ok(pair)
}

/// `{Wᵢ⊥}` with projections `I - Pᵢ`.
pub fn complement_family<T: Field>(
    fam: &SubspaceFamily<T>,
    tol: &Tolerance,
) -> Result<SubspaceFamily<T>> {
    let members = fam
        .members()
        .iter()
        .map(|s| s.complement(tol))
        .collect::<Result<_>>()?;
    SubspaceFamily::new(fam.ambient_dim(), members)
}

/// Phase retrieval of `{I - Pᵢ}` from a norm retrieval certificate for the
/// same complements, for a family that itself yields phase retrieval.
///
/// Pass the primary family's phase retrieval certificate if one exists;
/// without it the hypothesis is recorded as assumed. A certificate that is
/// not `YES` is rejected.
pub fn complements_pr_via_nr(
    primary_pr: Option<&Certificate>,
    nr_of_complements: &Certificate,
) -> Result<Certificate> {
    let basis = match primary_pr {
        Some(c) if c.verdict != Verdict::Yes => {
            return Err(Error::PreconditionViolated(
                "primary family is not certified to yield phase retrieval".into(),
            ))
        }
        Some(_) => "certified",
        None => "assumed",
    };
    let mut out = Certificate::new(
        nr_of_complements.verdict,
        Method::ComplementNormRetrieval,
        nr_of_complements.arithmetic_mode,
    )
    .with_detail(format!("primary phase retrieval {basis}"));
    out.witness = nr_of_complements.witness.clone();
    Ok(out)
}

/// If `I = Σ aᵢ Pᵢ` with `Σ aᵢ ≠ 1`, the complements `{Wᵢ⊥}` yield phase
/// retrieval, provided the family itself does (the caller's responsibility).
pub fn complement_pr_from_identity_coefficients<T: Field>(
    fam: &SubspaceFamily<T>,
    a: &[T],
    tol: &Tolerance,
) -> Result<Certificate> {
    if a.len() != fam.len() {
        return Err(Error::DimensionMismatch {
            expected: fam.len(),
            got: a.len(),
        });
    }
    let id = Mat::identity(fam.ambient_dim());
    let sum = fam.weighted_sum(a);
    if !sum.approx_eq(&id, tol.witness_tol) {
        return Err(Error::BadCoefficients(sum.max_abs_diff(&id)));
    }
    let total = a.iter().fold(T::zero(), |acc, v| acc + v.clone());
    let verdict = if (total - T::one()).within(tol.witness_tol) {
        Verdict::Unknown
    } else {
        Verdict::Yes
    };
    Ok(
        Certificate::new(verdict, Method::IdentitySumNotOne, T::MODE)
            .with_witness(Witness::Coefficients {
                coefficients: scalars(a),
            })
            .with_detail("assumes the family yields phase retrieval"),
    )
}

/// Generic rank-one family `Pᵢ = ψᵢψᵢᵀ`, `ψᵢ = S^{-1/2}φᵢ / ‖S^{-1/2}φᵢ‖`,
/// satisfying `I = Σ ‖S^{-1/2}φᵢ‖² Pᵢ`.
#[derive(Clone, Debug, Serialize)]
pub struct RankOneFamily {
    #[serde(skip)]
    pub frame: Frame<Rational>,
    #[serde(skip)]
    pub generators: Frame<f64>,
    #[serde(skip)]
    pub family: SubspaceFamily<f64>,
    pub coefficients: Vec<f64>,
    /// `max |Σ aᵢPᵢ - I|`
    pub identity_residual: f64,
    /// Rank of the vectorized projections.
    pub vectorized_rank: usize,
    /// The identity lies outside the span of every leave-one-out
    /// subfamily (checked exactly on `{φᵢφᵢᵀ}`).
    pub proper_subfamilies_exclude_identity: bool,
    pub attempts: usize,
}

impl RankOneFamily {
    /// `φᵢ` (exact), `ψᵢ` and the coefficients with their checks.
    pub fn witness(&self) -> Witness {
        Witness::Family {
            vectors: self.frame.vectors().iter().map(|v| scalars(v)).collect(),
            generators: self
                .generators
                .vectors()
                .iter()
                .map(|v| scalars(v))
                .collect(),
            coefficients: scalars(&self.coefficients),
            identity_residual: self.identity_residual,
            vectorized_rank: self.vectorized_rank,
            proper_subfamilies_exclude_identity: self.proper_subfamilies_exclude_identity,
        }
    }

    /// `YES` (identity in the span, so norm retrieval) when every recorded
    /// check holds.
    pub fn certificate(&self, tol: &Tolerance) -> Certificate {
        let ok = self.identity_residual <= tol.witness_tol
            && self.coefficients.iter().all(|&a| a > 0.0)
            && self.vectorized_rank == self.family.len()
            && self.proper_subfamilies_exclude_identity;
        let verdict = if ok { Verdict::Yes } else { Verdict::Unknown };
        Certificate::new(verdict, Method::IdentityInSpan, ArithmeticMode::Float)
            .with_witness(self.witness())
    }
}

const MAX_ATTEMPTS: usize = 100;

fn vectorized_outer(frame: &Frame<Rational>, skip: Option<usize>) -> Vec<Vec<Rational>> {
    frame
        .vectors()
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != skip)
        .map(|(_, v)| outer(v, v).vectorize())
        .collect()
}

/// `S` is outside `span{φᵢφᵢᵀ}_{i≠k}` for every `k`. Since
/// `I = Σ cᵢ Pᵢ ⟺ S = Σ (cᵢ/aᵢ) φᵢφᵢᵀ`, this is the exact form of "the
/// identity is not in the span of any proper subfamily".
fn leave_one_out_excludes(frame: &Frame<Rational>, tol: &Tolerance) -> Result<bool> {
    let n = frame.dim();
    let s = frame.frame_operator().vectorize();
    for k in 0..frame.len() {
        let cols = vectorized_outer(frame, Some(k));
        let base = linalg::rank(&Mat::from_columns(&cols, n * n)?, tol)?;
        let mut with_s = cols;
        with_s.push(s.clone());
        if linalg::rank(&Mat::from_columns(&with_s, n * n)?, tol)? != base + 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn generic_rank_one_family(
    n: usize,
    m: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<RankOneFamily> {
    if n == 0 || m < 2 * n || m > n * (n + 1) / 2 {
        return Err(Error::RangeError(format!(
            "need 2n <= m <= n(n+1)/2, got n = {n}, m = {m}"
        )));
    }
    let mut rng = random::rng(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        let frame = random::integer_frame(n, m, 5, &mut rng);
        if !is_full_spark(&frame, tol, DEFAULT_MAX_M.max(m))? {
            continue;
        }
        let outer_rank = linalg::rank(
            &Mat::from_columns(&vectorized_outer(&frame, None), n * n)?,
            tol,
        )?;
        if outer_rank != m || !leave_one_out_excludes(&frame, tol)? {
            continue;
        }
        let f = frame.to_float();
        let root = inv_sqrt_psd(f.frame_operator(), tol)?;
        let g = f.map_vectors(&root)?;
        let coefficients: Vec<f64> = g.vectors().iter().map(|v| dot(v, v)).collect();
        let psi: Vec<Vec<f64>> = g
            .vectors()
            .iter()
            .map(|v| {
                let len = norm_f64(v);
                v.iter().map(|x| x / len).collect()
            })
            .collect();
        let generators = Frame::new(n, psi)?;
        let family = SubspaceFamily::rank_one(&generators, tol)?;
        let identity_residual = family
            .weighted_sum(&coefficients)
            .max_abs_diff(&Mat::identity(n));
        let vec_cols: Vec<Vec<f64>> = family
            .members()
            .iter()
            .map(|s| s.projection().vectorize())
            .collect();
        let vectorized_rank = linalg::rank(&Mat::from_columns(&vec_cols, n * n)?, tol)?;
        if identity_residual > tol.witness_tol || vectorized_rank != m {
            continue;
        }
        return Ok(RankOneFamily {
            frame,
            generators,
            family,
            coefficients,
            identity_residual,
            vectorized_rank,
            proper_subfamilies_exclude_identity: true,
            attempts: attempt,
        });
    }
    Err(Error::ResampleExhausted(MAX_ATTEMPTS))
}
