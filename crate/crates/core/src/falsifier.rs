//! Counterexample construction for phase retrieval and a heuristic search
//! for norm retrieval violations.
//!
//! The search minimizes `f(x, y) = Σ (‖Pᵢx‖² - ‖Pᵢy‖²)²` on the product of
//! spheres `‖x‖ = 1`, `‖y‖ = 1 + delta`, so any zero of `f` is a genuine
//! violation. Finding nothing proves nothing.

use faer::linalg::solvers::Solve;
use faer::{Mat as FMat, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::WitnessPair;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::{self, dot, Field, Mat, Tolerance};
use crate::random;
use crate::subspace::SubspaceFamily;

/// Accepted measurement gap for a search result.
pub const SEARCH_MEASUREMENT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial step; halved whenever a step fails to decrease `f`.
    pub step: f64,
    /// `‖y‖ = 1 + delta`.
    pub delta: f64,
    pub residual_accept: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 64,
            max_iters: 2000,
            step: 0.1,
            delta: 0.25,
            residual_accept: 1e-12,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.step, self.delta, self.residual_accept]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if positive && self.restarts > 0 && self.max_iters > 0 {
            Ok(())
        } else {
            Err(Error::RangeError(
                "search parameters must be positive".into(),
            ))
        }
    }
}

/// Signals with equal frame measurements built from a partition where
/// neither side spans: `x = u + v`, `y = u - v` with `u ⊥ {φᵢ}_I` and
/// `v ⊥ {φᵢ}_{Iᶜ}`.
pub fn pr_witness_from_partition<T: Field>(
    f: &Frame<T>,
    subset: &[usize],
    tol: &Tolerance,
) -> Result<WitnessPair<T>> {
    let m = f.len();
    let mut inside = subset.to_vec();
    inside.sort_unstable();
    inside.dedup();
    if let Some(&bad) = inside.iter().find(|&&i| i >= m) {
        return Err(Error::RangeError(format!(
            "index {bad} out of range for {m} vectors"
        )));
    }
    let outside: Vec<usize> = (0..m)
        .filter(|i| inside.binary_search(i).is_err())
        .collect();
    let scale = f.scale();
    let orthogonal_to = |idx: &[usize]| -> Result<Vec<T>> {
        if f.subset_rank_scaled(idx, tol, scale)? == f.dim() {
            return Err(Error::NotAViolation);
        }
        let kernel = T::null_space_scaled(&f.columns_of(idx).transpose(), tol, scale)?;
        if kernel.cols() == 0 {
            return Err(Error::NotAViolation);
        }
        Ok(kernel.column(0))
    };
    let u = orthogonal_to(&inside)?;
    let v = orthogonal_to(&outside)?;
    Ok(WitnessPair::for_frame(
        f,
        linalg::add_vec(&u, &v),
        linalg::sub_vec(&u, &v),
    ))
}

fn residuals(projs: &[Mat<f64>], x: &[f64], y: &[f64]) -> Vec<f64> {
    projs
        .iter()
        .map(|p| dot(x, &p.mul_vec(x)) - dot(y, &p.mul_vec(y)))
        .collect()
}

/// `Σ (‖Pᵢx‖² - ‖Pᵢy‖²)²`
pub fn objective(projs: &[Mat<f64>], x: &[f64], y: &[f64]) -> f64 {
    residuals(projs, x, y).iter().map(|r| r * r).sum()
}

/// `(∇ₓf, ∇ᵧf) = (Σ 4rᵢPᵢx, -Σ 4rᵢPᵢy)`
pub fn gradient(projs: &[Mat<f64>], x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let mut gx = vec![0.0; n];
    let mut gy = vec![0.0; n];
    for (p, r) in projs.iter().zip(residuals(projs, x, y)) {
        let px = p.mul_vec(x);
        let py = p.mul_vec(y);
        for k in 0..n {
            gx[k] += 4.0 * r * px[k];
            gy[k] -= 4.0 * r * py[k];
        }
    }
    (gx, gy)
}

fn projections(fam: &SubspaceFamily<f64>) -> Vec<Mat<f64>> {
    fam.members()
        .iter()
        .map(|s| s.projection().clone())
        .collect()
}

/// Largest relative discrepancy between the analytic gradient and central
/// differences with `h = 1e-5`. When both gradients are below `1e-8` the
/// absolute discrepancy is returned instead.
pub fn gradient_check(fam: &SubspaceFamily<f64>, x: &[f64], y: &[f64]) -> Result<f64> {
    let n = fam.ambient_dim();
    for v in [x, y] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        if v.iter().all(|c| *c == 0.0) {
            return Err(Error::ZeroVector);
        }
    }
    const H: f64 = 1e-5;
    let projs = projections(fam);
    let (gx, gy) = gradient(&projs, x, y);
    let analytic: Vec<f64> = gx.into_iter().chain(gy).collect();
    let point: Vec<f64> = x.iter().chain(y).copied().collect();
    let eval = |p: &[f64]| objective(&projs, &p[..n], &p[n..]);
    let numeric: Vec<f64> = (0..2 * n)
        .map(|k| {
            let mut plus = point.clone();
            let mut minus = point.clone();
            plus[k] += H;
            minus[k] -= H;
            (eval(&plus) - eval(&minus)) / (2.0 * H)
        })
        .collect();
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let diff = analytic
        .iter()
        .zip(&numeric)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = sup(&analytic).max(sup(&numeric));
    Ok(if scale <= 1e-8 { diff } else { diff / scale })
}

fn onto_sphere(v: &[f64], radius: f64) -> Vec<f64> {
    let n = linalg::norm_f64(v);
    v.iter().map(|c| c * radius / n).collect()
}

/// Damped Gauss-Newton in the tangent space of the two spheres; drives the
/// residual from gradient-descent accuracy to rounding level.
fn polish(projs: &[Mat<f64>], x: &mut Vec<f64>, y: &mut Vec<f64>, ry: f64) -> f64 {
    let n = x.len();
    let m = projs.len();
    let mut f = objective(projs, x, y);
    let mut lambda = 1e-12;
    for _ in 0..100 {
        if f < 1e-30 || lambda > 1e6 {
            break;
        }
        let r = residuals(projs, x, y);
        let xh = onto_sphere(x, 1.0);
        let yh = onto_sphere(y, 1.0);
        let tangent = |g: Vec<f64>, u: &[f64]| -> Vec<f64> {
            let c = dot(&g, u);
            g.iter().zip(u).map(|(gi, ui)| gi - c * ui).collect()
        };
        let mut jac = FMat::<f64>::zeros(m, 2 * n);
        for (i, p) in projs.iter().enumerate() {
            let jx = tangent(p.mul_vec(x).iter().map(|v| 2.0 * v).collect(), &xh);
            let jy = tangent(p.mul_vec(y).iter().map(|v| -2.0 * v).collect(), &yh);
            for k in 0..n {
                jac[(i, k)] = jx[k];
                jac[(i, n + k)] = jy[k];
            }
        }
        let jjt = &jac * jac.transpose();
        let diag = (0..m).fold(1.0f64, |acc, i| acc.max(jjt[(i, i)]));
        let damped = FMat::from_fn(m, m, |i, j| {
            jjt[(i, j)] + if i == j { lambda * diag } else { 0.0 }
        });
        let rhs = FMat::from_fn(m, 1, |i, _| r[i]);
        let Ok(llt) = damped.llt(Side::Lower) else {
            lambda *= 10.0;
            continue;
        };
        let d = -(jac.transpose() * llt.solve(&rhs));
        let xn = onto_sphere(&(0..n).map(|k| x[k] + d[(k, 0)]).collect::<Vec<_>>(), 1.0);
        let yn = onto_sphere(
            &(0..n).map(|k| y[k] + d[(n + k, 0)]).collect::<Vec<_>>(),
            ry,
        );
        let fn_ = objective(projs, &xn, &yn);
        if fn_ < f {
            *x = xn;
            *y = yn;
            f = fn_;
            lambda = (lambda / 10.0).max(1e-15);
        } else {
            lambda *= 10.0;
        }
    }
    f
}

/// Objective value at which descent hands over to the polish.
const HANDOFF: f64 = 1e-8;

struct RestartResult {
    residual: f64,
    x: Vec<f64>,
    y: Vec<f64>,
}

fn run_restart(projs: &[Mat<f64>], n: usize, cfg: &SearchConfig, restart: usize) -> RestartResult {
    let mut rng = random::stream_rng(cfg.seed, restart as u64);
    let ry = 1.0 + cfg.delta;
    let mut x = random::unit_vector(n, &mut rng);
    let mut y = onto_sphere(&random::unit_vector(n, &mut rng), ry);
    let mut f = objective(projs, &x, &y);
    let mut step = cfg.step;
    for _ in 0..cfg.max_iters {
        // Gauss-Newton finishes faster than descent from here.
        if f <= HANDOFF.max(cfg.residual_accept) {
            break;
        }
        let (gx, gy) = gradient(projs, &x, &y);
        let xn = onto_sphere(&linalg::sub_vec(&x, &linalg::scale_vec(&gx, &step)), 1.0);
        let yn = onto_sphere(&linalg::sub_vec(&y, &linalg::scale_vec(&gy, &step)), ry);
        let fn_ = objective(projs, &xn, &yn);
        if fn_ < f {
            x = xn;
            y = yn;
            f = fn_;
            step = (step * 2.0).min(cfg.step);
        } else {
            step *= 0.5;
            if step < 1e-18 {
                break;
            }
        }
    }
    let residual = polish(projs, &mut x, &mut y, ry);
    RestartResult { residual, x, y }
}

/// Diagnostics from a search, with the accepted witness if any.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub witness: Option<WitnessPair<f64>>,
    pub best_residual: f64,
    pub best_restart: usize,
}

/// Restarts run in parallel batches of this size; the search stops after
/// the first batch that yields an accepted witness.
const RESTART_BATCH: usize = 8;

/// Projected gradient descent with seeded restarts. The chosen restart is
/// the accepted one with the lowest residual (ties by index) within the
/// first batch that has one. Batch boundaries are fixed, so the result does
/// not depend on the thread count.
pub fn nr_violation_search_detailed(
    fam: &SubspaceFamily<f64>,
    cfg: &SearchConfig,
) -> Result<SearchOutcome> {
    cfg.validate()?;
    let n = fam.ambient_dim();
    let projs = projections(fam);
    let mut best: Option<(usize, WitnessPair<f64>, f64)> = None;
    let mut lowest = (f64::INFINITY, 0);
    for batch in (0..cfg.restarts).step_by(RESTART_BATCH) {
        let end = (batch + RESTART_BATCH).min(cfg.restarts);
        let runs: Vec<RestartResult> = (batch..end)
            .into_par_iter()
            .map(|k| run_restart(&projs, n, cfg, k))
            .collect();
        for (k, run) in (batch..end).zip(runs) {
            if run.residual < lowest.0 {
                lowest = (run.residual, k);
            }
            if run.residual > cfg.residual_accept {
                continue;
            }
            let pair = WitnessPair::for_family(fam, run.x, run.y);
            let valid =
                pair.measurement_gap <= SEARCH_MEASUREMENT_TOL && pair.norm_gap >= cfg.delta / 2.0;
            if valid && best.as_ref().is_none_or(|(_, _, r)| run.residual < *r) {
                best = Some((k, pair, run.residual));
            }
        }
        if best.is_some() {
            break;
        }
    }
    Ok(match best {
        Some((k, pair, r)) => SearchOutcome {
            witness: Some(pair),
            best_residual: r,
            best_restart: k,
        },
        None => SearchOutcome {
            witness: None,
            best_residual: lowest.0,
            best_restart: lowest.1,
        },
    })
}

/// A pair violating norm retrieval, if the search finds one.
pub fn nr_violation_search(
    fam: &SubspaceFamily<f64>,
    cfg: &SearchConfig,
) -> Result<Option<WitnessPair<f64>>> {
    Ok(nr_violation_search_detailed(fam, cfg)?.witness)
}
