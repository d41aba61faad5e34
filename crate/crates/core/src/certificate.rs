//! Verdicts, method tags and machine-checkable witnesses.

use serde::{Deserialize, Serialize};

use crate::frame::{Frame, FrameReport};
use crate::linalg::{add_vec, dot, norm_f64, sub_vec, to_f64_vec, ArithmeticMode, Field, Mat};
use crate::scalar::Scalar;
use crate::subspace::SubspaceFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    /// Exhaustive partition enumeration.
    ComplementProperty,
    /// Fewer than `2N - 1` vectors.
    CountBound,
    IdentityInSpan,
    SumProjectionsIdentity,
    Orthogonality,
    /// Heuristic search ran out of budget.
    SearchExhausted,
    OptimizationSearch,
    /// Identity in the span with coefficient sum different from one.
    IdentitySumNotOne,
    /// Phase retrieval of complements read off their norm retrieval.
    ComplementNormRetrieval,
    /// No implemented sufficient condition applies.
    NoSufficientCondition,
    NaimarkBounds,
    NaimarkConstruction,
    FrameBounds,
    SparkEnumeration,
    InvertibleEquivalence,
    WitnessReplay,
    CatalogExample,
}

/// Serialized form of a [`WitnessPair`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairPayload {
    pub x: Vec<Scalar>,
    pub y: Vec<Scalar>,
    pub measurement_gap: f64,
    pub norm_gap: f64,
    pub phase_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsPayload {
    pub n: usize,
    pub m: usize,
    pub primary_pr: Verdict,
    pub complement_pr: Verdict,
    pub hypothesis_holds: bool,
    pub lower_bound_holds: bool,
    pub upper_bound_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledCertificate {
    pub label: String,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckPayload {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

/// Typed witness payloads. Indices are zero-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// One side `I` of a partition (the other side is the complement).
    Partition {
        subset: Vec<usize>,
    },
    PartitionPair {
        subset: Vec<usize>,
        pair: PairPayload,
    },
    Pair {
        pair: PairPayload,
    },
    Coefficients {
        coefficients: Vec<Scalar>,
    },
    Spark {
        spark: usize,
        full_spark: Option<bool>,
        dependent_subset: Option<Vec<usize>>,
    },
    Report {
        report: FrameReport,
    },
    Naimark {
        complement_dim: usize,
        complement: Vec<Vec<Scalar>>,
        gram_residual: f64,
        verified: bool,
    },
    /// `{frame_operator · φᵢ}` fails norm retrieval on `pair`.
    Operator {
        frame_operator: Vec<Vec<Scalar>>,
        signal_operator: Vec<Vec<Scalar>>,
        pair: PairPayload,
    },
    Bounds(BoundsPayload),
    Suite {
        ground_truth: Verdict,
        trials: usize,
        preserved: usize,
        mismatched_trials: Vec<usize>,
        counterexample: Option<Box<Witness>>,
    },
    Family {
        vectors: Vec<Vec<Scalar>>,
        generators: Vec<Vec<Scalar>>,
        coefficients: Vec<Scalar>,
        identity_residual: f64,
        vectorized_rank: usize,
        proper_subfamilies_exclude_identity: bool,
    },
    Bundle {
        checks: Vec<CheckPayload>,
        certificates: Vec<LabeledCertificate>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub method: Method,
    pub arithmetic_mode: ArithmeticMode,
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Certificate {
    pub fn new(verdict: Verdict, method: Method, mode: ArithmeticMode) -> Self {
        Certificate {
            verdict,
            method,
            arithmetic_mode: mode,
            witness: None,
            detail: None,
        }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn is_yes(&self) -> bool {
        self.verdict == Verdict::Yes
    }

    pub fn is_no(&self) -> bool {
        self.verdict == Verdict::No
    }
}

pub fn scalars<T: Field>(v: &[T]) -> Vec<Scalar> {
    v.iter().map(Field::to_scalar).collect()
}

pub fn matrix_rows<T: Field>(m: &Mat<T>) -> Vec<Vec<Scalar>> {
    (0..m.rows()).map(|i| scalars(m.row(i))).collect()
}

/// Two signals with equal intensity measurements, plus the gaps recomputed
/// from them.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessPair<T: Field> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    /// Max over measurements of the difference of magnitudes.
    pub measurement_gap: f64,
    /// `| ‖x‖ - ‖y‖ |`
    pub norm_gap: f64,
    /// `min over c = ±1 of ‖x - c y‖`
    pub phase_gap: f64,
}

fn phase_gap<T: Field>(x: &[T], y: &[T]) -> f64 {
    norm_f64(&sub_vec(x, y)).min(norm_f64(&add_vec(x, y)))
}

impl<T: Field> WitnessPair<T> {
    /// Gaps measured by `|⟨·, φᵢ⟩|` against a frame.
    pub fn for_frame(frame: &Frame<T>, x: Vec<T>, y: Vec<T>) -> Self {
        let measurement_gap = frame
            .vectors()
            .iter()
            .map(|v| (dot(&x, v).to_f64().abs() - dot(&y, v).to_f64().abs()).abs())
            .fold(0.0, f64::max);
        Self::assemble(x, y, measurement_gap)
    }

    /// Gaps measured by `‖Pᵢ ·‖` against a projection family.
    pub fn for_family(fam: &SubspaceFamily<T>, x: Vec<T>, y: Vec<T>) -> Self {
        let measurement_gap = fam
            .members()
            .iter()
            .map(|s| {
                let a = norm_f64(&s.apply(&x));
                let b = norm_f64(&s.apply(&y));
                (a - b).abs()
            })
            .fold(0.0, f64::max);
        Self::assemble(x, y, measurement_gap)
    }

    fn assemble(x: Vec<T>, y: Vec<T>, measurement_gap: f64) -> Self {
        let norm_gap = (norm_f64(&x) - norm_f64(&y)).abs();
        let phase_gap = phase_gap(&x, &y);
        WitnessPair {
            x,
            y,
            measurement_gap,
            norm_gap,
            phase_gap,
        }
    }

    /// Exact (or `tol`-close) equality of squared frame measurements.
    pub fn frame_measurements_match(&self, frame: &Frame<T>, tol: f64) -> bool {
        frame.vectors().iter().all(|v| {
            let a = dot(&self.x, v);
            let b = dot(&self.y, v);
            (a.clone() * a - b.clone() * b).within(tol)
        })
    }

    /// Exact (or `tol`-close) equality of `‖Pᵢx‖²` and `‖Pᵢy‖²`.
    pub fn family_measurements_match(&self, fam: &SubspaceFamily<T>, tol: f64) -> bool {
        fam.members()
            .iter()
            .all(|s| (s.measure(&self.x) - s.measure(&self.y)).within(tol))
    }

    pub fn payload(&self) -> PairPayload {
        PairPayload {
            x: scalars(&self.x),
            y: scalars(&self.y),
            measurement_gap: self.measurement_gap,
            norm_gap: self.norm_gap,
            phase_gap: self.phase_gap,
        }
    }

    pub fn to_f64(&self) -> WitnessPair<f64> {
        WitnessPair {
            x: to_f64_vec(&self.x),
            y: to_f64_vec(&self.y),
            measurement_gap: self.measurement_gap,
            norm_gap: self.norm_gap,
            phase_gap: self.phase_gap,
        }
    }
}
