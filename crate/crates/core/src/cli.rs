//! Command line front end. `run` is pure apart from reading input files, so
//! it can be driven from tests; the binary only prints and exits.

use std::ffi::OsString;
use std::fs;

use clap::{Args, Parser, Subcommand};

use crate::catalog;
use crate::certificate::scalars;
use crate::certificate::{Certificate, Method, Verdict, Witness};
use crate::error::Error;
use crate::falsifier::{nr_violation_search_detailed, pr_witness_from_partition, SearchConfig};
use crate::frame::Frame;
use crate::io::{AnyFamily, AnyFrame, CertificateFile, FrameFile, SubspaceFile};
use crate::linalg::{ArithmeticMode, Field, Tolerance};
use crate::naimark::{naimark_complement, naimark_pr_bounds, verify_naimark_pair};
use crate::replay::{replay, ReplayInput};
use crate::spark::{
    complement_property, find_cp_violation, spark_with_witness, yields_phase_retrieval_vectors,
    DEFAULT_MAX_M,
};
use crate::subspace::{
    generic_rank_one_family, norm_retrieval_certificate, norm_retrieval_falsifier, SubspaceFamily,
};
use crate::transforms::invertible_equivalence_suite;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_FORMAT: i32 = 65;

#[derive(Parser, Debug)]
#[command(
    name = "phaseret",
    version,
    about = "Certify or falsify phase and norm retrieval"
)]
struct Cli {
    /// Witness tolerance for float arithmetic.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Relative singular value threshold for float rank decisions.
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest vector count allowed for exhaustive enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_M)]
    max_m: usize,
    /// Force exact rational arithmetic.
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,
    /// Force float arithmetic.
    #[arg(long, global = true)]
    float: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Input JSON file.
    file: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Frame bounds, tightness and Parseval check.
    Report(Input),
    /// Spark with a smallest dependent subset.
    Spark(Input),
    /// Complement property by partition enumeration.
    Cp(Input),
    /// Phase retrieval by vectors, with a signal pair on failure.
    PrVectors(Input),
    /// Naimark complement of a Parseval frame.
    Naimark {
        file: String,
        /// Check the both-sides phase retrieval bounds instead.
        #[arg(long)]
        bounds: bool,
    },
    /// Norm retrieval certificate for a subspace family.
    NrCert(Input),
    /// Search for a norm retrieval violation.
    NrFalsify {
        file: String,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Signal pair from a complement property violation.
    PrFalsify {
        file: String,
        /// Comma-separated zero-based indices of one side; searched when
        /// omitted.
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
    },
    /// Phase retrieval under random invertible operators, with a norm
    /// retrieval failure on NO instances.
    AbcSuite {
        file: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Generic rank-one family with the identity in its span.
    PopFamily {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        m: usize,
    },
    /// Worked example bundle.
    Example {
        /// One of duplicate-vector, free-measurement, pop-generic, naimark-bounds.
        name: String,
    },
    /// Re-check a certificate's witness against its input.
    Verify {
        certificate: String,
        /// Frame or subspace file the certificate was issued for.
        input: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Report(_) => "report",
            Command::Spark(_) => "spark",
            Command::Cp(_) => "cp",
            Command::PrVectors(_) => "pr-vectors",
            Command::Naimark { .. } => "naimark",
            Command::NrCert(_) => "nr-cert",
            Command::NrFalsify { .. } => "nr-falsify",
            Command::PrFalsify { .. } => "pr-falsify",
            Command::AbcSuite { .. } => "abc-suite",
            Command::PopFamily { .. } => "pop-family",
            Command::Example { .. } => "example",
            Command::Verify { .. } => "verify",
        }
    }
}

/// Exit code, standard output and standard error of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failure(code: i32, message: impl Into<String>) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: message.into(),
        }
    }
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Yes => EXIT_YES,
        Verdict::No => EXIT_NO,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::TooLarge { .. }
        | Error::RangeError(_)
        | Error::UnknownExample(_)
        | Error::InvalidTolerance => EXIT_USAGE,
        _ => EXIT_FORMAT,
    }
}

struct Context {
    tol: Tolerance,
    seed: u64,
    max_m: usize,
    mode: Option<ArithmeticMode>,
}

/// Read failures are input errors.
fn read(path: &str) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(|e| Error::Format(format!("{path}: {e}")))
}

fn text(bytes: &[u8]) -> Result<&str, Error> {
    std::str::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

fn load_frame(bytes: &[u8], ctx: &Context) -> Result<AnyFrame, Error> {
    FrameFile::parse(text(bytes)?)?.to_frame(ctx.mode)
}

fn load_family(bytes: &[u8], ctx: &Context) -> Result<AnyFamily, Error> {
    SubspaceFile::parse(text(bytes)?)?.to_family(ctx.mode, &ctx.tol)
}

/// Dispatches a generic frame computation on the frame's arithmetic.
macro_rules! on_frame {
    ($frame:expr, |$f:ident| $body:expr) => {
        match $frame {
            AnyFrame::Exact($f) => $body,
            AnyFrame::Float($f) => $body,
        }
    };
}

macro_rules! on_family {
    ($fam:expr, |$f:ident| $body:expr) => {
        match $fam {
            AnyFamily::Exact($f) => $body,
            AnyFamily::Float($f) => $body,
        }
    };
}

fn report<T: Field>(f: &Frame<T>, ctx: &Context) -> Result<Certificate, Error> {
    let report = f.report(&ctx.tol)?;
    let verdict = if report.is_frame {
        Verdict::Yes
    } else {
        Verdict::No
    };
    Ok(Certificate::new(verdict, Method::FrameBounds, T::MODE)
        .with_witness(Witness::Report { report }))
}

fn spark<T: Field>(f: &Frame<T>, ctx: &Context) -> Result<Certificate, Error> {
    let (spark, dependent_subset) = spark_with_witness(f, &ctx.tol, ctx.max_m)?;
    let full_spark = (f.len() >= f.dim()).then_some(spark == f.dim() + 1);
    Ok(
        Certificate::new(Verdict::Yes, Method::SparkEnumeration, T::MODE)
            .with_witness(Witness::Spark {
                spark,
                full_spark,
                dependent_subset,
            })
            .with_detail(format!("spark = {spark}")),
    )
}

fn naimark<T: Field>(f: &Frame<T>, bounds: bool, ctx: &Context) -> Result<Certificate, Error> {
    let pair = naimark_complement(f, &ctx.tol)?;
    if bounds {
        return naimark_pr_bounds(&pair, &ctx.tol, ctx.max_m);
    }
    let verified = verify_naimark_pair(&pair, &ctx.tol);
    let verdict = if verified { Verdict::Yes } else { Verdict::No };
    Ok(
        Certificate::new(verdict, Method::NaimarkConstruction, ArithmeticMode::Float).with_witness(
            Witness::Naimark {
                complement_dim: pair.complement().dim(),
                complement: pair
                    .complement()
                    .vectors()
                    .iter()
                    .map(|v| scalars(v))
                    .collect(),
                gram_residual: pair.gram_residual(),
                verified,
            },
        ),
    )
}

fn pr_falsify<T: Field>(
    f: &Frame<T>,
    subset: Option<Vec<usize>>,
    ctx: &Context,
) -> Result<Certificate, Error> {
    let subset = match subset {
        Some(s) => s,
        None => match find_cp_violation(f, &ctx.tol, ctx.max_m)? {
            Some(s) => s,
            None => {
                return Ok(
                    Certificate::new(Verdict::Yes, Method::ComplementProperty, T::MODE)
                        .with_detail("complement property holds; no violating partition"),
                )
            }
        },
    };
    let pair = pr_witness_from_partition(f, &subset, &ctx.tol)?;
    Ok(
        Certificate::new(Verdict::No, Method::ComplementProperty, T::MODE).with_witness(
            Witness::PartitionPair {
                subset,
                pair: pair.payload(),
            },
        ),
    )
}

/// The constructive falsifier when its hypothesis holds, the optimization
/// search otherwise.
fn nr_falsify<T: Field>(
    fam: &SubspaceFamily<T>,
    cfg: &SearchConfig,
    ctx: &Context,
) -> Result<Certificate, Error> {
    match norm_retrieval_falsifier(fam, &ctx.tol) {
        Ok(pair) => {
            return Ok(
                Certificate::new(Verdict::No, Method::SumProjectionsIdentity, T::MODE)
                    .with_witness(Witness::Pair {
                        pair: pair.payload(),
                    }),
            )
        }
        Err(Error::PreconditionViolated(_)) | Err(Error::ZeroSubspace) => {}
        Err(e) => return Err(e),
    }
    let out = nr_violation_search_detailed(&fam.to_float(), cfg)?;
    Ok(match out.witness {
        Some(pair) => Certificate::new(
            Verdict::No,
            Method::OptimizationSearch,
            ArithmeticMode::Float,
        )
        .with_witness(Witness::Pair {
            pair: pair.payload(),
        })
        .with_detail(format!(
            "restart {}, residual {:e}",
            out.best_restart, out.best_residual
        )),
        None => Certificate::new(
            Verdict::Unknown,
            Method::SearchExhausted,
            ArithmeticMode::Float,
        )
        .with_detail(format!(
            "no violation found; best residual {:e} at restart {}",
            out.best_residual, out.best_restart
        )),
    })
}

fn execute(cli: Cli) -> Result<(Certificate, Vec<u8>), Error> {
    let mut tol = Tolerance::default();
    if let Some(t) = cli.tol {
        tol.witness_tol = t;
    }
    if let Some(t) = cli.rank_tol {
        tol.rank_rel_tol = t;
    }
    tol.validate()?;
    let mode = match (cli.exact, cli.float) {
        (true, _) => Some(ArithmeticMode::Exact),
        (_, true) => Some(ArithmeticMode::Float),
        _ => None,
    };
    let ctx = Context {
        tol,
        seed: cli.seed,
        max_m: cli.max_m,
        mode,
    };
    Ok(match cli.command {
        Command::Report(Input { file }) => {
            let bytes = read(&file)?;
            (
                on_frame!(&load_frame(&bytes, &ctx)?, |f| report(f, &ctx))?,
                bytes,
            )
        }
        Command::Spark(Input { file }) => {
            let bytes = read(&file)?;
            (
                on_frame!(&load_frame(&bytes, &ctx)?, |f| spark(f, &ctx))?,
                bytes,
            )
        }
        Command::Cp(Input { file }) => {
            let bytes = read(&file)?;
            let c = on_frame!(&load_frame(&bytes, &ctx)?, |f| complement_property(
                f, &ctx.tol, ctx.max_m
            ))?;
            (c, bytes)
        }
        Command::PrVectors(Input { file }) => {
            let bytes = read(&file)?;
            let c = on_frame!(&load_frame(&bytes, &ctx)?, |f| {
                yields_phase_retrieval_vectors(f, &ctx.tol, ctx.max_m)
            })?;
            (c, bytes)
        }
        Command::Naimark { file, bounds } => {
            let bytes = read(&file)?;
            (
                on_frame!(&load_frame(&bytes, &ctx)?, |f| naimark(f, bounds, &ctx))?,
                bytes,
            )
        }
        Command::NrCert(Input { file }) => {
            let bytes = read(&file)?;
            let c = on_family!(&load_family(&bytes, &ctx)?, |f| norm_retrieval_certificate(
                f, &ctx.tol
            ))?;
            (c, bytes)
        }
        Command::NrFalsify {
            file,
            restarts,
            max_iters,
            delta,
        } => {
            let bytes = read(&file)?;
            let mut cfg = SearchConfig {
                seed: ctx.seed,
                ..SearchConfig::default()
            };
            cfg.restarts = restarts.unwrap_or(cfg.restarts);
            cfg.max_iters = max_iters.unwrap_or(cfg.max_iters);
            cfg.delta = delta.unwrap_or(cfg.delta);
            let c = on_family!(&load_family(&bytes, &ctx)?, |f| nr_falsify(f, &cfg, &ctx))?;
            (c, bytes)
        }
        Command::PrFalsify { file, subset } => {
            let bytes = read(&file)?;
            (
                on_frame!(&load_frame(&bytes, &ctx)?, |f| pr_falsify(f, subset, &ctx))?,
                bytes,
            )
        }
        Command::AbcSuite { file, trials } => {
            let bytes = read(&file)?;
            let c = on_frame!(&load_frame(&bytes, &ctx)?, |f| {
                invertible_equivalence_suite(f, trials, ctx.seed, &ctx.tol, ctx.max_m)
                    .map(|r| r.certificate())
            })?;
            (c, bytes)
        }
        Command::PopFamily { n, m } => {
            let fam = generic_rank_one_family(n, m, ctx.seed, &ctx.tol)?;
            let key = format!("pop-family n={n} m={m} seed={}", ctx.seed);
            (fam.certificate(&ctx.tol), key.into_bytes())
        }
        Command::Example { name } => {
            let c = catalog::example(&name, ctx.seed, &ctx.tol, ctx.max_m)?;
            let key = format!("example {name} seed={}", ctx.seed);
            (c, key.into_bytes())
        }
        Command::Verify { certificate, input } => {
            let cert_bytes = read(&certificate)?;
            let file = CertificateFile::parse(text(&cert_bytes)?)?;
            let replay_input = match &input {
                None => ReplayInput::None,
                Some(path) => {
                    let bytes = read(path)?;
                    let digest = crate::io::digest(&bytes);
                    if digest != file.inputs_digest {
                        return Err(Error::Format(format!(
                            "{path} does not match the certificate's input digest"
                        )));
                    }
                    let t = text(&bytes)?;
                    if t.contains("\"subspaces\"") {
                        ReplayInput::Family(load_family(&bytes, &ctx)?)
                    } else {
                        ReplayInput::Frame(load_frame(&bytes, &ctx)?)
                    }
                }
            };
            (
                replay(&file.certificate, &replay_input, &ctx.tol)?,
                cert_bytes,
            )
        }
    })
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome::failure(EXIT_USAGE, rendered)
            } else {
                Outcome {
                    code: 0,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };
    let command = cli.command.name();
    match execute(cli) {
        Ok((cert, input)) => {
            let code = exit_code(cert.verdict);
            let mut stdout = CertificateFile::new(cert, command, &input).to_json();
            stdout.push('\n');
            Outcome {
                code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => Outcome::failure(error_code(&e), format!("error: {e}\n")),
    }
}

/// Sizes the global thread pool from `THREADS` if set. Later calls are
/// ignored once a pool exists.
pub fn configure_threads() {
    if let Some(n) = std::env::var("THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_and_usage_errors() {
        let help = run(["phaseret", "--help"]);
        assert_eq!(help.code, 0);
        assert!(help.stdout.contains("pr-vectors"));
        assert_eq!(run(["phaseret"]).code, EXIT_USAGE);
        assert_eq!(
            run(["phaseret", "--exact", "--float", "pop-family"]).code,
            EXIT_USAGE
        );
        assert_eq!(
            run(["phaseret", "--tol", "-1", "pop-family"]).code,
            EXIT_USAGE
        );
    }

    #[test]
    fn pop_family_runs_in_process() {
        let out = run(["phaseret", "--seed", "2", "pop-family"]);
        assert_eq!(out.code, EXIT_YES, "{}", out.stderr);
        let file = CertificateFile::parse(&out.stdout).unwrap();
        assert_eq!(file.command, "pop-family");
        assert!(matches!(
            file.certificate.witness,
            Some(Witness::Family { .. })
        ));
        assert_eq!(
            run(["phaseret", "pop-family", "--n", "3", "--m", "7"]).code,
            EXIT_USAGE
        );
    }
}
