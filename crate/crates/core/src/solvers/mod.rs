//! Iterative ILS solvers and their shared outer loop.
//!
//! Every method iterates `x_{k+1} = F(x_k)` from `x₀ = 0` (unless a start
//! vector is configured), records the relative residual after each outer
//! step, and stops once it drops below `outer_tol` or `max_outer` is hit.

pub mod rk_rgs;
pub mod scd;
pub mod sp;
pub mod ussor;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{IlsError, Result};
use crate::problem::{IlsProblem, ResidualEvaluator};
use crate::sampling::AlphaPolicy;

/// Relative residual past which an iteration is declared divergent.
pub const DIVERGENCE_RR: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Threshold on the relative residual.
    pub outer_tol: f64,
    pub max_outer: usize,
    /// Relative tolerance of the randomized inner solves.
    pub inner_tol: f64,
    /// Inner step cap per outer iteration; `None` means `100·n`.
    pub max_inner: Option<usize>,
    /// Inner steps between exact residual checks; `None` means `n`.
    pub check_every: Option<usize>,
    pub alpha_policy: AlphaPolicy,
    pub seed: u64,
    pub x0: Option<Vec<f64>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            outer_tol: 1e-6,
            max_outer: 20_000,
            inner_tol: 1e-8,
            max_inner: None,
            check_every: None,
            alpha_policy: AlphaPolicy::Uniform,
            seed: 0,
            x0: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if [self.outer_tol, self.inner_tol]
            .iter()
            .any(|t| t.is_nan() || *t <= 0.0)
        {
            return Err(IlsError::Parameter("tolerances must be positive".into()));
        }
        if self.max_outer == 0 || self.max_inner == Some(0) || self.check_every == Some(0) {
            return Err(IlsError::Parameter("iteration caps must be >= 1".into()));
        }
        self.alpha_policy.validate()?;
        if let Some(x0) = &self.x0 {
            if x0.len() != n {
                return Err(IlsError::Dimension(format!(
                    "start vector has length {}, expected {n}",
                    x0.len()
                )));
            }
        }
        Ok(())
    }

    pub fn max_inner_for(&self, n: usize) -> usize {
        self.max_inner.unwrap_or(100 * n)
    }

    pub fn check_every_for(&self, n: usize) -> usize {
        self.check_every.unwrap_or(n).max(1)
    }

    fn start(&self, n: usize) -> Vec<f64> {
        self.x0.clone().unwrap_or_else(|| vec![0.0; n])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub x: Vec<f64>,
    pub outer_iters: usize,
    pub inner_iters_total: usize,
    /// Inner iteration count of each outer step (empty for non-nested methods).
    pub inner_iters: Vec<usize>,
    /// Relative residual after each outer step.
    pub rr_history: Vec<f64>,
    /// Seconds around the whole solve, precompute included.
    pub wall_time: f64,
    /// Seconds spent inside inner solves.
    pub inner_time: f64,
    pub converged: bool,
    /// Residual exceeded [`DIVERGENCE_RR`] or became non-finite.
    pub diverged: bool,
}

impl SolveReport {
    pub fn final_rr(&self) -> Option<f64> {
        self.rr_history.last().copied()
    }
}

/// Output of one outer step.
pub(crate) struct OuterStep {
    pub x: Vec<f64>,
    pub inner_iters: Option<usize>,
    pub inner_time: Duration,
}

impl OuterStep {
    pub fn plain(x: Vec<f64>) -> Self {
        Self {
            x,
            inner_iters: None,
            inner_time: Duration::ZERO,
        }
    }
}

/// Runs the outer loop shared by all iterative methods. `started` is the
/// instant the solve began, so precompute time is included.
pub(crate) fn drive(
    prob: &IlsProblem,
    cfg: &SolverConfig,
    started: Instant,
    mut step: impl FnMut(&[f64]) -> Result<OuterStep>,
) -> Result<SolveReport> {
    let evaluator = ResidualEvaluator::new(prob)?;
    let mut x = cfg.start(prob.n());
    let mut report = SolveReport {
        x: Vec::new(),
        outer_iters: 0,
        inner_iters_total: 0,
        inner_iters: Vec::new(),
        rr_history: Vec::new(),
        wall_time: 0.0,
        inner_time: 0.0,
        converged: false,
        diverged: false,
    };
    let mut inner_time = Duration::ZERO;

    while report.outer_iters < cfg.max_outer {
        let out = step(&x)?;
        x = out.x;
        report.outer_iters += 1;
        inner_time += out.inner_time;
        if let Some(t) = out.inner_iters {
            report.inner_iters.push(t);
            report.inner_iters_total += t;
        }
        let rr = evaluator.evaluate(&x)?;
        report.rr_history.push(rr);
        if rr < cfg.outer_tol {
            report.converged = true;
            break;
        }
        if !rr.is_finite() || rr > DIVERGENCE_RR {
            report.diverged = true;
            break;
        }
    }

    report.x = x;
    report.inner_time = inner_time.as_secs_f64();
    report.wall_time = started.elapsed().as_secs_f64();
    Ok(report)
}
