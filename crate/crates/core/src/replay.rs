//! Re-validates certificate witnesses against their inputs without
//! repeating any search.

use crate::certificate::{Certificate, Method, PairPayload, Verdict, Witness, WitnessPair};
use crate::error::{Error, Result};
use crate::falsifier::SEARCH_MEASUREMENT_TOL;
use crate::frame::Frame;
use crate::io::{AnyFamily, AnyFrame};
use crate::linalg::{ArithmeticMode, Field, Mat, Tolerance};
use crate::scalar::Scalar;
use crate::subspace::SubspaceFamily;

/// The input a certificate was issued for.
#[derive(Clone, Debug)]
pub enum ReplayInput {
    Frame(AnyFrame),
    Family(AnyFamily),
    /// Self-contained certificates (catalog bundles, generated families).
    None,
}

/// Smallest accepted norm gap for a norm retrieval violation.
pub const MIN_NORM_GAP: f64 = 1e-6;

/// Outcome of checking one witness.
enum Check {
    Confirmed,
    Rejected(String),
    NotReplayable(&'static str),
}

fn lift_vec<T: Field>(v: &[Scalar], dim: usize) -> Result<Vec<T>> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    v.iter()
        .map(|s| T::from_scalar(s).ok_or_else(|| Error::Format(format!("bad scalar {s}"))))
        .collect()
}

fn lift_mat<T: Field>(rows: &[Vec<Scalar>], dim: usize) -> Result<Mat<T>> {
    let rows = rows
        .iter()
        .map(|r| lift_vec(r, dim))
        .collect::<Result<Vec<_>>>()?;
    if rows.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: rows.len(),
        });
    }
    Mat::from_rows(&rows, dim)
}

fn measurement_tol<T: Field>(method: Method, tol: &Tolerance) -> f64 {
    match (T::MODE, method) {
        (ArithmeticMode::Exact, _) => 0.0,
        (_, Method::OptimizationSearch) => SEARCH_MEASUREMENT_TOL,
        _ => tol.witness_tol,
    }
}

fn sides_fail_to_span<T: Field>(f: &Frame<T>, subset: &[usize], tol: &Tolerance) -> Result<Check> {
    if subset.iter().any(|&i| i >= f.len()) {
        return Ok(Check::Rejected("partition index out of range".into()));
    }
    let rest: Vec<usize> = (0..f.len()).filter(|i| !subset.contains(i)).collect();
    for side in [subset, rest.as_slice()] {
        if f.subset_rank(side, tol)? == f.dim() {
            return Ok(Check::Rejected(format!("side {side:?} spans")));
        }
    }
    Ok(Check::Confirmed)
}

fn frame_pair<T: Field>(
    f: &Frame<T>,
    pair: &PairPayload,
    method: Method,
    tol: &Tolerance,
) -> Result<Check> {
    let x = lift_vec(&pair.x, f.dim())?;
    let y = lift_vec(&pair.y, f.dim())?;
    let p = WitnessPair::for_frame(f, x, y);
    if !p.frame_measurements_match(f, measurement_tol::<T>(method, tol)) {
        return Ok(Check::Rejected(format!(
            "measurements differ by {:e}",
            p.measurement_gap
        )));
    }
    if p.phase_gap <= tol.witness_tol {
        return Ok(Check::Rejected("signals agree up to sign".into()));
    }
    Ok(Check::Confirmed)
}

fn family_pair<T: Field>(
    fam: &SubspaceFamily<T>,
    pair: &PairPayload,
    method: Method,
    tol: &Tolerance,
) -> Result<Check> {
    let n = fam.ambient_dim();
    let p = WitnessPair::for_family(fam, lift_vec(&pair.x, n)?, lift_vec(&pair.y, n)?);
    if !p.family_measurements_match(fam, measurement_tol::<T>(method, tol)) {
        return Ok(Check::Rejected(format!(
            "measurements differ by {:e}",
            p.measurement_gap
        )));
    }
    if p.norm_gap < MIN_NORM_GAP {
        return Ok(Check::Rejected(format!(
            "norm gap {:e} too small",
            p.norm_gap
        )));
    }
    Ok(Check::Confirmed)
}

fn operator_pair<T: Field>(
    f: &Frame<T>,
    frame_operator: &[Vec<Scalar>],
    signal_operator: &[Vec<Scalar>],
    pair: &PairPayload,
    tol: &Tolerance,
) -> Result<Check> {
    let n = f.dim();
    let a: Mat<T> = lift_mat(frame_operator, n)?;
    let t: Mat<T> = lift_mat(signal_operator, n)?;
    // ⟨Tx, A φ⟩ = ⟨x, φ⟩ for all x exactly when AᵀT = I.
    let defect = (&a.transpose() * &t).max_abs_diff(&Mat::identity(n));
    let allowed = if T::MODE == ArithmeticMode::Exact {
        0.0
    } else {
        tol.witness_tol
    };
    if defect > allowed {
        return Ok(Check::Rejected(format!(
            "frame operator is not the inverse transpose (defect {defect:e})"
        )));
    }
    let g = f.map_vectors(&a)?;
    let p = WitnessPair::for_frame(&g, lift_vec(&pair.x, n)?, lift_vec(&pair.y, n)?);
    if !p.frame_measurements_match(&g, allowed) {
        return Ok(Check::Rejected(format!(
            "measurements differ by {:e}",
            p.measurement_gap
        )));
    }
    if p.norm_gap < MIN_NORM_GAP {
        return Ok(Check::Rejected(format!(
            "norm gap {:e} too small",
            p.norm_gap
        )));
    }
    Ok(Check::Confirmed)
}

fn coefficients<T: Field>(fam: &SubspaceFamily<T>, a: &[Scalar], tol: &Tolerance) -> Result<Check> {
    if a.len() != fam.len() {
        return Ok(Check::Rejected(
            "one coefficient per member expected".into(),
        ));
    }
    let a = lift_vec::<T>(a, fam.len())?;
    let residual = fam
        .weighted_sum(&a)
        .max_abs_diff(&Mat::identity(fam.ambient_dim()));
    let allowed = if T::MODE == ArithmeticMode::Exact {
        0.0
    } else {
        tol.witness_tol
    };
    Ok(if residual <= allowed {
        Check::Confirmed
    } else {
        Check::Rejected(format!("coefficients miss the identity by {residual:e}"))
    })
}

fn spark_subset<T: Field>(
    f: &Frame<T>,
    spark: usize,
    subset: &[usize],
    tol: &Tolerance,
) -> Result<Check> {
    if subset.len() != spark || subset.iter().any(|&i| i >= f.len()) {
        return Ok(Check::Rejected(
            "dependent subset does not match the spark".into(),
        ));
    }
    Ok(if f.subset_rank(subset, tol)? < subset.len() {
        Check::Confirmed
    } else {
        Check::Rejected("subset is independent".into())
    })
}

fn check_frame<T: Field>(
    cert: &Certificate,
    w: &Witness,
    f: &Frame<T>,
    tol: &Tolerance,
) -> Result<Check> {
    match w {
        Witness::Partition { subset } => sides_fail_to_span(f, subset, tol),
        Witness::PartitionPair { subset, pair } => match sides_fail_to_span(f, subset, tol)? {
            Check::Confirmed => frame_pair(f, pair, cert.method, tol),
            other => Ok(other),
        },
        Witness::Pair { pair } => frame_pair(f, pair, cert.method, tol),
        Witness::Operator {
            frame_operator,
            signal_operator,
            pair,
        } => operator_pair(f, frame_operator, signal_operator, pair, tol),
        Witness::Suite {
            counterexample: Some(c),
            ..
        } => check_frame(cert, c, f, tol),
        Witness::Spark {
            spark,
            dependent_subset: Some(s),
            ..
        } => spark_subset(f, *spark, s, tol),
        Witness::Report { report } => {
            let fresh = f.report(tol)?;
            Ok(if fresh.is_frame == report.is_frame {
                Check::Confirmed
            } else {
                Check::Rejected("frame report disagrees".into())
            })
        }
        _ => Ok(Check::NotReplayable(
            "witness needs enumeration to re-check",
        )),
    }
}

fn check_family<T: Field>(
    cert: &Certificate,
    w: &Witness,
    fam: &SubspaceFamily<T>,
    tol: &Tolerance,
) -> Result<Check> {
    match w {
        Witness::Pair { pair } => family_pair(fam, pair, cert.method, tol),
        Witness::Coefficients { coefficients: a } => coefficients(fam, a, tol),
        _ => Ok(Check::NotReplayable(
            "witness needs enumeration to re-check",
        )),
    }
}

/// Re-checks `cert` against `input`. The result repeats the original
/// verdict when the witness holds up and is `UNKNOWN` otherwise, with the
/// reason in `detail`.
pub fn replay(cert: &Certificate, input: &ReplayInput, tol: &Tolerance) -> Result<Certificate> {
    let check = match (&cert.witness, input) {
        (None, _) => Check::NotReplayable("certificate carries no witness"),
        (Some(w), ReplayInput::Frame(AnyFrame::Exact(f))) => check_frame(cert, w, f, tol)?,
        (Some(w), ReplayInput::Frame(AnyFrame::Float(f))) => check_frame(cert, w, f, tol)?,
        (Some(w), ReplayInput::Family(AnyFamily::Exact(f))) => check_family(cert, w, f, tol)?,
        (Some(w), ReplayInput::Family(AnyFamily::Float(f))) => check_family(cert, w, f, tol)?,
        (Some(Witness::Bundle { checks, .. }), ReplayInput::None) => {
            match checks.iter().find(|c| !c.passed) {
                None => Check::Confirmed,
                Some(c) => Check::Rejected(format!("check {:?} failed", c.label)),
            }
        }
        (Some(_), ReplayInput::None) => Check::NotReplayable("witness needs its input file"),
    };
    let (verdict, detail) = match check {
        Check::Confirmed => (cert.verdict, "witness re-validated".to_string()),
        Check::Rejected(why) => (Verdict::Unknown, format!("witness rejected: {why}")),
        Check::NotReplayable(why) => (Verdict::Unknown, format!("not replayable: {why}")),
    };
    Ok(Certificate::new(verdict, Method::WitnessReplay, cert.arithmetic_mode).with_detail(detail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Rational;
    use crate::spark::{complement_property, yields_phase_retrieval_vectors, DEFAULT_MAX_M};
    use crate::subspace::norm_retrieval_certificate;
    use crate::transforms::invertible_equivalence_suite;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn basis() -> Frame<Rational> {
        Frame::from_ints(2, &[&[1, 0], &[0, 1]]).unwrap()
    }

    #[test]
    fn frame_witnesses_replay() {
        let f = basis();
        let input = ReplayInput::Frame(AnyFrame::Exact(f.clone()));
        for cert in [
            complement_property(&f, &tol(), DEFAULT_MAX_M).unwrap(),
            yields_phase_retrieval_vectors(&f, &tol(), DEFAULT_MAX_M).unwrap(),
            invertible_equivalence_suite(&f, 3, 0, &tol(), DEFAULT_MAX_M)
                .unwrap()
                .certificate(),
        ] {
            let r = replay(&cert, &input, &tol()).unwrap();
            assert_eq!(r.verdict, Verdict::No, "{:?}", r.detail);
        }
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let f: Frame<Rational> = Frame::from_ints(2, &[&[1, 0], &[0, 1], &[1, 1]]).unwrap();
        let forged = Certificate::new(
            Verdict::No,
            Method::ComplementProperty,
            ArithmeticMode::Exact,
        )
        .with_witness(Witness::Partition { subset: vec![0] });
        let r = replay(&forged, &ReplayInput::Frame(AnyFrame::Exact(f)), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Unknown);
        assert!(r.detail.unwrap().contains("spans"));
    }

    #[test]
    fn family_witnesses_replay() {
        let s = (0.5f64).sqrt();
        let fam = SubspaceFamily::from_spanning_sets(
            2,
            &[vec![vec![1.0, 0.0]], vec![vec![s, s]]],
            &tol(),
        )
        .unwrap();
        let cert = norm_retrieval_certificate(&fam, &tol()).unwrap();
        assert_eq!(cert.verdict, Verdict::No);
        let r = replay(&cert, &ReplayInput::Family(AnyFamily::Float(fam)), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::No);

        let fam: SubspaceFamily<Rational> = SubspaceFamily::from_spanning_sets(
            2,
            &[
                vec![vec![Rational::from_i64(1), Rational::from_i64(0)]],
                vec![vec![Rational::from_i64(0), Rational::from_i64(1)]],
            ],
            &tol(),
        )
        .unwrap();
        let cert = norm_retrieval_certificate(&fam, &tol()).unwrap();
        assert_eq!(cert.verdict, Verdict::Yes);
        let r = replay(&cert, &ReplayInput::Family(AnyFamily::Exact(fam)), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
    }
}
