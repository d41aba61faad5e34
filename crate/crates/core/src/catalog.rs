//! Reproducible worked examples, each returned as a bundle of checks and
//! the certificates behind them.

use crate::certificate::{Certificate, CheckPayload, LabeledCertificate, Method, Verdict, Witness};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::{dot, norm_f64, ArithmeticMode, Field, Rational, Tolerance};
use crate::naimark::{
    full_spark_duality, naimark_complement, naimark_pr_bounds, verify_naimark_pair,
};
use crate::random;
use crate::spark::{complement_property, is_full_spark, yields_phase_retrieval_vectors};
use crate::subspace::{generic_rank_one_family, identity_in_span, norm_retrieval_certificate};

pub const EXAMPLES: [&str; 4] = [
    "duplicate-vector",
    "free-measurement",
    "pop-generic",
    "naimark-bounds",
];

#[derive(Default)]
struct Bundle {
    checks: Vec<CheckPayload>,
    certificates: Vec<LabeledCertificate>,
}

impl Bundle {
    fn check(&mut self, label: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckPayload {
            label: label.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    fn cert(&mut self, label: &str, certificate: Certificate) -> &Certificate {
        self.certificates.push(LabeledCertificate {
            label: label.to_string(),
            certificate,
        });
        &self.certificates.last().expect("just pushed").certificate
    }

    /// `YES` when every check passed, `NO` otherwise.
    fn finish(self, mode: ArithmeticMode, detail: &str) -> Certificate {
        let verdict = if self.checks.iter().all(|c| c.passed) {
            Verdict::Yes
        } else {
            Verdict::No
        };
        Certificate::new(verdict, Method::CatalogExample, mode)
            .with_witness(Witness::Bundle {
                checks: self.checks,
                certificates: self.certificates,
            })
            .with_detail(detail)
    }
}

/// Runs a named example. `seed` only affects the randomized ones.
pub fn example(name: &str, seed: u64, tol: &Tolerance, max_m: usize) -> Result<Certificate> {
    match name {
        "duplicate-vector" => duplicate_vector(tol, max_m),
        "free-measurement" => free_measurement(seed, tol, max_m),
        "pop-generic" => pop_generic(seed, tol, max_m),
        "naimark-bounds" => naimark_bounds(tol, max_m),
        _ => Err(Error::UnknownExample(name.to_string())),
    }
}

/// `e₁, e₁, e₂, e₃, (1,1,1), (1,2,3)` in `R^3`: the first vector repeated.
pub fn duplicate_vector_frame() -> Frame<Rational> {
    Frame::from_ints(
        3,
        &[
            &[1, 0, 0],
            &[1, 0, 0],
            &[0, 1, 0],
            &[0, 0, 1],
            &[1, 1, 1],
            &[1, 2, 3],
        ],
    )
    .expect("valid frame")
}

/// The canonical Parseval frame of a frame with a repeated vector does
/// phase retrieval, but in its Naimark complement the two copies and the
/// remaining vectors both fail to span.
fn duplicate_vector(tol: &Tolerance, max_m: usize) -> Result<Certificate> {
    let mut b = Bundle::default();
    let parseval = duplicate_vector_frame().canonical_parseval(tol)?;
    let pair = naimark_complement(&parseval, tol)?;
    b.check(
        "naimark pair verified",
        verify_naimark_pair(&pair, tol),
        format!("gram residual {:e}", pair.gram_residual()),
    );
    let primary = b
        .cert(
            "primary phase retrieval",
            yields_phase_retrieval_vectors(&parseval, tol, max_m)?,
        )
        .verdict;
    b.check(
        "primary yields phase retrieval",
        primary == Verdict::Yes,
        format!("{primary:?}"),
    );
    let cp = b.cert(
        "complement property of the complement",
        complement_property(pair.complement(), tol, max_m)?,
    );
    let subset = match &cp.witness {
        Some(Witness::Partition { subset }) => subset.clone(),
        _ => Vec::new(),
    };
    let cp_verdict = cp.verdict;
    b.check(
        "complement fails the complement property",
        cp_verdict == Verdict::No,
        format!("{cp_verdict:?}"),
    );
    b.check(
        "violating side is the duplicated pair",
        subset == [0, 1],
        format!("{subset:?}"),
    );
    b.cert(
        "complement phase retrieval",
        yields_phase_retrieval_vectors(pair.complement(), tol, max_m)?,
    );
    Ok(b.finish(
        ArithmeticMode::Float,
        "repeated vector: frame PR yes, complement PR no",
    ))
}

pub fn free_measurement_vectors() -> (Frame<Rational>, Frame<Rational>) {
    let full = Frame::from_ints(
        3,
        &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1], &[1, 2, 3]],
    )
    .expect("valid frame");
    let partial = full.select(&[0, 1, 3, 4]).expect("valid indices");
    (full, partial)
}

/// Statistics for the unit-norm recovery demonstration.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeMeasurementStats {
    /// Max error of `1 - |x₁|² - |x₂|²` against `|x₃|²`.
    pub reconstruction_error: f64,
    /// Signals for which some candidate consistent with the four
    /// measurements and the norm was not `±x`.
    pub ambiguous: usize,
    pub trials: usize,
}

/// For random unit `x`: recover `|⟨x,e₃⟩|²` from the norm, then check
/// that every sign choice consistent with all five magnitudes is `±x`.
pub fn free_measurement_stats(seed: u64, trials: usize) -> FreeMeasurementStats {
    let (_, partial) = free_measurement_vectors();
    let partial = partial.to_float();
    let (phi1, phi2) = (partial.vector(2), partial.vector(3));
    let mut rng = random::rng(seed);
    let mut reconstruction_error = 0.0f64;
    let mut ambiguous = 0;
    for _ in 0..trials {
        let x = random::unit_vector(3, &mut rng);
        let third = 1.0 - x[0] * x[0] - x[1] * x[1];
        reconstruction_error = reconstruction_error.max((third - x[2] * x[2]).abs());
        let a = [x[0].abs(), x[1].abs(), third.max(0.0).sqrt()];
        let (m1, m2) = (dot(&x, phi1).abs(), dot(&x, phi2).abs());
        let mut found_x = false;
        for signs in 0..8u32 {
            let c: Vec<f64> = (0..3)
                .map(|k| if signs >> k & 1 == 1 { -a[k] } else { a[k] })
                .collect();
            let consistent = (dot(&c, phi1).abs() - m1).abs() <= 1e-9
                && (dot(&c, phi2).abs() - m2).abs() <= 1e-9;
            if !consistent {
                continue;
            }
            let plus: Vec<f64> = c.iter().zip(&x).map(|(u, v)| u - v).collect();
            let minus: Vec<f64> = c.iter().zip(&x).map(|(u, v)| u + v).collect();
            if norm_f64(&plus).min(norm_f64(&minus)) <= 1e-9 {
                found_x = true;
            } else {
                ambiguous += 1;
            }
        }
        if !found_x {
            ambiguous += 1;
        }
    }
    FreeMeasurementStats {
        reconstruction_error,
        ambiguous,
        trials,
    }
}

/// Four vectors in `R^3` cannot do phase retrieval, but for unit signals
/// the norm supplies the missing fifth measurement.
fn free_measurement(seed: u64, tol: &Tolerance, max_m: usize) -> Result<Certificate> {
    let mut b = Bundle::default();
    let (full, partial) = free_measurement_vectors();
    b.check(
        "five vectors are full spark",
        is_full_spark(&full, tol, max_m)?,
        "",
    );
    let v = b
        .cert(
            "five vectors",
            yields_phase_retrieval_vectors(&full, tol, max_m)?,
        )
        .verdict;
    b.check(
        "five vectors yield phase retrieval",
        v == Verdict::Yes,
        format!("{v:?}"),
    );
    let four = b.cert(
        "four vectors",
        yields_phase_retrieval_vectors(&partial, tol, max_m)?,
    );
    let four_verdict = four.verdict;
    let unequal_norms = match &four.witness {
        Some(Witness::PartitionPair { pair, .. }) => {
            let sq = |v: &[crate::scalar::Scalar]| -> Rational {
                v.iter()
                    .map(|s| Rational::from_scalar(s).expect("exact"))
                    .map(|r| r.clone() * r)
                    .fold(Rational::from_i64(0), |acc, t| acc + t)
            };
            sq(&pair.x) != sq(&pair.y)
        }
        _ => false,
    };
    b.check(
        "four vectors fail phase retrieval",
        four_verdict == Verdict::No,
        format!("{four_verdict:?}"),
    );
    b.check(
        "the violating pair has unequal norms",
        unequal_norms,
        "equal norms would force x = ±y",
    );
    let stats = free_measurement_stats(seed, 100);
    b.check(
        "norm recovers the fifth measurement",
        stats.reconstruction_error <= 1e-10,
        format!(
            "max error {:e} over {} unit signals",
            stats.reconstruction_error, stats.trials
        ),
    );
    b.check(
        "unit signals are determined up to sign",
        stats.ambiguous == 0,
        format!("{} ambiguous of {}", stats.ambiguous, stats.trials),
    );
    Ok(b.finish(
        ArithmeticMode::Exact,
        "norm information as one free measurement",
    ))
}

/// The generic rank-one family with the identity in its span, plus its
/// leave-one-out subfamilies, which drop the identity but still do phase
/// retrieval.
fn pop_generic(seed: u64, tol: &Tolerance, max_m: usize) -> Result<Certificate> {
    let mut b = Bundle::default();
    let fam = generic_rank_one_family(3, 6, seed, tol)?;
    b.check(
        "weighted projections sum to the identity",
        fam.identity_residual <= 1e-9,
        format!("max residual {:e}", fam.identity_residual),
    );
    b.check(
        "coefficients are positive",
        fam.coefficients.iter().all(|&a| a > 0.0),
        format!("{:?}", fam.coefficients),
    );
    b.check(
        "projections are linearly independent",
        fam.vectorized_rank == 6,
        format!("vectorized rank {}", fam.vectorized_rank),
    );
    b.check(
        "identity outside every proper subfamily span",
        fam.proper_subfamilies_exclude_identity,
        "exact leave-one-out rank test",
    );
    let mut excluded = true;
    let mut all_pr = true;
    for k in 0..6 {
        let keep: Vec<usize> = (0..6).filter(|&i| i != k).collect();
        excluded &= identity_in_span(&fam.family.select(&keep)?, tol)?.is_none();
        all_pr &=
            yields_phase_retrieval_vectors(&fam.generators.select(&keep)?, tol, max_m)?.is_yes();
    }
    b.check(
        "five-member subfamilies miss the identity",
        excluded,
        "float identity-in-span test",
    );
    b.check(
        "five-member subfamilies yield phase retrieval",
        all_pr,
        "complement property",
    );
    b.cert("family", fam.certificate(tol));
    b.cert(
        "norm retrieval",
        norm_retrieval_certificate(&fam.family, tol)?,
    );
    Ok(b.finish(
        ArithmeticMode::Float,
        &format!("n = 3, m = 6, seed = {seed}"),
    ))
}

/// `(1, t, t²)` for `t = 0..m`: full spark in `R^3`.
pub fn moment_frame(m: usize) -> Frame<Rational> {
    let vectors = (0..m as i64)
        .map(|t| {
            vec![
                Rational::from_i64(1),
                Rational::from_i64(t),
                Rational::from_i64(t * t),
            ]
        })
        .collect();
    Frame::new(3, vectors).expect("valid frame")
}

/// Full spark Parseval frames with `M = 2N-1, 2N, 2N+1` do phase retrieval
/// on both sides of the Naimark pair; at `M = 2N+2` the complement cannot.
fn naimark_bounds(tol: &Tolerance, max_m: usize) -> Result<Certificate> {
    let mut b = Bundle::default();
    for m in 5..=8 {
        let parseval = moment_frame(m).canonical_parseval(tol)?;
        let pair = naimark_complement(&parseval, tol)?;
        b.check(
            &format!("M = {m}: naimark pair verified"),
            verify_naimark_pair(&pair, tol),
            "",
        );
        b.check(
            &format!("M = {m}: full spark on both sides"),
            is_full_spark(&parseval, tol, max_m)? && full_spark_duality(&pair, tol, max_m)?,
            "",
        );
        let cert = naimark_pr_bounds(&pair, tol, max_m)?;
        let Some(Witness::Bounds(w)) = cert.witness.clone() else {
            unreachable!("bounds certificates carry bounds")
        };
        let expect_both = m <= 7;
        let label = if expect_both {
            format!("M = {m}: both sides yield phase retrieval")
        } else {
            format!("M = {m}: complement fails phase retrieval")
        };
        b.check(
            &label,
            w.hypothesis_holds == expect_both && cert.verdict == Verdict::Yes,
            format!(
                "primary {:?}, complement {:?}",
                w.primary_pr, w.complement_pr
            ),
        );
        b.cert(&format!("M = {m}"), cert);
    }
    Ok(b.finish(ArithmeticMode::Float, "N = 3, M = 5..8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spark::DEFAULT_MAX_M;

    fn run(name: &str) -> Certificate {
        example(name, 0, &Tolerance::default(), DEFAULT_MAX_M).unwrap()
    }

    fn failed(c: &Certificate) -> Vec<String> {
        match &c.witness {
            Some(Witness::Bundle { checks, .. }) => checks
                .iter()
                .filter(|k| !k.passed)
                .map(|k| format!("{}: {}", k.label, k.detail))
                .collect(),
            _ => vec!["no bundle".into()],
        }
    }

    #[test]
    fn every_example_passes() {
        for name in EXAMPLES {
            let c = run(name);
            assert_eq!(c.verdict, Verdict::Yes, "{name}: {:?}", failed(&c));
        }
    }

    #[test]
    fn unknown_example() {
        assert!(matches!(
            example("nope", 0, &Tolerance::default(), DEFAULT_MAX_M),
            Err(Error::UnknownExample(_))
        ));
    }

    #[test]
    fn free_measurement_statistics() {
        let s = free_measurement_stats(7, 100);
        assert!(s.reconstruction_error <= 1e-10);
        assert_eq!(s.ambiguous, 0);
    }
}
