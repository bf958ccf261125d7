//! Trial runner, averaging, speed-ups, flop model and CSV tables.
//!
//! A trial is one solve with its own RNG stream. By default every trial of
//! an experiment shares one problem instance and only the solver stream
//! varies; [`ExperimentSpec::regenerate_per_trial`] redraws the problem too.
//! Generator streams are the even stream ids of the problem seed and solver
//! streams the odd ids of the solver seed, so the two never coincide even
//! when both seeds are equal.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{IlsError, Result};
use crate::generators::{gen_random_ils, GenSpec};
use crate::problem::{relative_residual, IlsProblem};
use crate::reference::{solve_normal_direct, solve_qr_cholesky};
use crate::sampling::RngState;
use crate::solvers::rk_rgs::sp_rk_rgs_solve_with_rng;
use crate::solvers::scd::sp_scd_solve_with_rng;
use crate::solvers::sp::sp_solve;
use crate::solvers::ussor::ussor_solve;
use crate::solvers::{SolveReport, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Sp,
    SpRkRgs,
    SpScd,
    Ussor,
    NormalDirect,
    QrCholesky,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Sp,
        Method::SpRkRgs,
        Method::SpScd,
        Method::Ussor,
        Method::NormalDirect,
        Method::QrCholesky,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Sp => "sp",
            Method::SpRkRgs => "sp-rk-rgs",
            Method::SpScd => "sp-scd",
            Method::Ussor => "ussor",
            Method::NormalDirect => "normal-direct",
            Method::QrCholesky => "qr-cholesky",
        }
    }

    pub fn is_direct(self) -> bool {
        matches!(self, Method::NormalDirect | Method::QrCholesky)
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Method::SpRkRgs | Method::SpScd)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = IlsError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                IlsError::Parse(format!(
                    "unknown method '{s}', expected one of sp, sp-rk-rgs, sp-scd, ussor, normal-direct, qr-cholesky"
                ))
            })
    }
}

/// Published `(ω, ω̂)` for the eight generated families, keyed by `(p, q, n)`.
const USSOR_PRESETS: [(usize, usize, usize, f64, f64); 12] = [
    (30000, 13000, 13000, 0.5, 1.0917),
    (30000, 14000, 14000, 0.5, 1.1087),
    (30000, 15000, 15000, 0.5, 1.1291),
    (40000, 13000, 13000, 0.5, 1.0412),
    (40000, 14000, 14000, 0.5, 1.0460),
    (40000, 15000, 15000, 0.5, 1.0516),
    (50000, 1, 13000, 0.5, 1.0080),
    (50000, 1, 14000, 0.5, 1.0083),
    (50000, 1, 15000, 0.5, 1.0085),
    (60000, 1, 13000, 0.5, 1.0063),
    (60000, 1, 14000, 0.5, 1.0064),
    (60000, 1, 15000, 0.5, 1.0066),
];

/// Looks up the tabulated USSOR parameters for a full-scale family.
pub fn ussor_preset(p: usize, q: usize, n: usize) -> Option<(f64, f64)> {
    USSOR_PRESETS
        .iter()
        .find(|&&(pp, qq, nn, _, _)| (pp, qq, nn) == (p, q, n))
        .map(|&(_, _, _, w, wh)| (w, wh))
}

#[derive(Debug, Clone)]
pub enum ProblemSource {
    Generated(GenSpec),
    Given(Arc<IlsProblem>),
}

impl ProblemSource {
    /// `(p, q, n)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        match self {
            ProblemSource::Generated(g) => (g.p, g.q, g.n),
            ProblemSource::Given(prob) => (prob.p(), prob.q(), prob.n()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub method: Method,
    pub source: ProblemSource,
    pub trials: usize,
    pub cfg: SolverConfig,
    pub ussor_params: Option<(f64, f64)>,
    pub regenerate_per_trial: bool,
    pub parallel: bool,
}

impl ExperimentSpec {
    /// Ten sequential trials on a single instance with default solver settings.
    pub fn new(method: Method, source: ProblemSource) -> Self {
        Self {
            method,
            source,
            trials: 10,
            cfg: SolverConfig::default(),
            ussor_params: None,
            regenerate_per_trial: false,
            parallel: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(IlsError::Parameter("trials must be >= 1".into()));
        }
        match (self.method, self.ussor_params) {
            (Method::Ussor, None) => Err(IlsError::Parameter(
                "ussor needs (omega, omega_hat); pass --omega and --omega-hat".into(),
            )),
            (Method::Ussor, Some(_)) | (_, None) => Ok(()),
            (m, Some(_)) => Err(IlsError::Parameter(format!(
                "omega parameters only apply to ussor, not {m}"
            ))),
        }?;
        if self.regenerate_per_trial && matches!(self.source, ProblemSource::Given(_)) {
            return Err(IlsError::Parameter(
                "per-trial regeneration needs a generated problem".into(),
            ));
        }
        if let ProblemSource::Generated(g) = &self.source {
            g.validate()?;
        }
        Ok(())
    }
}

fn generator_stream(seed: u64, trial: usize) -> RngState {
    RngState::stream(seed, 2 * trial as u64)
}

fn solver_stream(seed: u64, trial: usize) -> RngState {
    RngState::stream(seed, 2 * trial as u64 + 1)
}

/// One solve of `method` on `prob`. Direct methods report zero iterations
/// and a single residual entry.
pub fn solve_once(
    method: Method,
    prob: &IlsProblem,
    cfg: &SolverConfig,
    ussor_params: Option<(f64, f64)>,
    rng: &mut RngState,
) -> Result<SolveReport> {
    match method {
        Method::Sp => sp_solve(prob, cfg),
        Method::SpRkRgs => sp_rk_rgs_solve_with_rng(prob, cfg, rng),
        Method::SpScd => sp_scd_solve_with_rng(prob, cfg, rng),
        Method::Ussor => {
            let (omega, omega_hat) = ussor_params
                .ok_or_else(|| IlsError::Parameter("ussor needs (omega, omega_hat)".into()))?;
            ussor_solve(prob, omega, omega_hat, cfg)
        }
        Method::NormalDirect | Method::QrCholesky => {
            let started = Instant::now();
            let x = if method == Method::NormalDirect {
                solve_normal_direct(prob)?
            } else {
                solve_qr_cholesky(prob)?
            };
            let wall_time = started.elapsed().as_secs_f64();
            let rr = relative_residual(prob, &x)?;
            Ok(SolveReport {
                x,
                outer_iters: 0,
                inner_iters_total: 0,
                inner_iters: Vec::new(),
                rr_history: vec![rr],
                wall_time,
                inner_time: 0.0,
                converged: rr < cfg.outer_tol,
                diverged: false,
            })
        }
    }
}

/// Runs every trial and returns the reports in trial order.
pub fn run_trials(spec: &ExperimentSpec) -> Result<Vec<SolveReport>> {
    spec.validate()?;
    let shared: Option<Arc<IlsProblem>> = match (&spec.source, spec.regenerate_per_trial) {
        (ProblemSource::Given(prob), _) => Some(Arc::clone(prob)),
        (ProblemSource::Generated(g), false) => Some(Arc::new(gen_random_ils(
            g,
            &mut generator_stream(g.seed, 0),
        )?)),
        (ProblemSource::Generated(_), true) => None,
    };

    let one = |trial: usize| -> Result<SolveReport> {
        let prob = match (&shared, &spec.source) {
            (Some(p), _) => Arc::clone(p),
            (None, ProblemSource::Generated(g)) => {
                Arc::new(gen_random_ils(g, &mut generator_stream(g.seed, trial))?)
            }
            (None, ProblemSource::Given(p)) => Arc::clone(p),
        };
        let mut rng = solver_stream(spec.cfg.seed, trial);
        solve_once(spec.method, &prob, &spec.cfg, spec.ussor_params, &mut rng)
    };

    if spec.parallel {
        (0..spec.trials).into_par_iter().map(one).collect()
    } else {
        (0..spec.trials).map(one).collect()
    }
}

/// Averages the trials of one experiment into a table row.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ResultRow> {
    let reports = run_trials(spec)?;
    let (p, q, n) = spec.source.dims();
    Ok(ResultRow::from_reports(spec.method, p, q, n, &reports))
}

/// One line of a results table. Field names match the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    /// Mean outer iterations.
    #[serde(rename = "IT")]
    pub it: f64,
    /// Mean total inner iterations.
    #[serde(rename = "IT_inner")]
    pub it_inner: f64,
    /// Mean wall seconds per solve.
    #[serde(rename = "CPU")]
    pub cpu: f64,
    #[serde(rename = "CPU_inner")]
    pub cpu_inner: f64,
    #[serde(rename = "RR_final")]
    pub rr_final: f64,
    pub converged_fraction: f64,
    /// CPU of a baseline row divided by this row's CPU, when one was set.
    pub speedup: Option<f64>,
}

impl ResultRow {
    /// Arithmetic means over `reports`, summed in order.
    pub fn from_reports(
        method: Method,
        p: usize,
        q: usize,
        n: usize,
        reports: &[SolveReport],
    ) -> Self {
        let k = reports.len().max(1) as f64;
        let mean = |f: &dyn Fn(&SolveReport) -> f64| reports.iter().map(f).sum::<f64>() / k;
        Self {
            method: method.name().to_string(),
            m: p + q,
            n,
            p,
            q,
            it: mean(&|r| r.outer_iters as f64),
            it_inner: mean(&|r| r.inner_iters_total as f64),
            cpu: mean(&|r| r.wall_time),
            cpu_inner: mean(&|r| r.inner_time),
            rr_final: mean(&|r| r.final_rr().unwrap_or(f64::NAN)),
            converged_fraction: mean(&|r| if r.converged { 1.0 } else { 0.0 }),
            speedup: None,
        }
    }

    pub fn all_converged(&self) -> bool {
        self.converged_fraction == 1.0
    }
}

/// `baseline.CPU / other.CPU`.
pub fn speedup(baseline: &ResultRow, other: &ResultRow) -> Result<f64> {
    if !other.cpu.is_finite() || other.cpu <= 0.0 || !baseline.cpu.is_finite() {
        return Err(IlsError::Measurement(format!(
            "cannot form a speed-up from CPU times {} / {}",
            baseline.cpu, other.cpu
        )));
    }
    Ok(baseline.cpu / other.cpu)
}

/// Closed-form operation counts, with `m = p + q`.
///
/// * SP: `mn² + 4n³ + 2mn + 2n² − 2n + 2n²T`
/// * SP-RK-RGS: `qn² + 2mn − n + (2n² + (2pn + 6p + 2)·T_inner)·T`
/// * USSOR: `mn² + 2n³ + 2mn + 4pn + 3 − 2n + (6qn + 6n² + 6q + 9n + 7)·T`
/// * SP-SCD: `mn² + 2mn − n + (2n² + (2n + 2α + 4)·T_inner)·T`
///
/// `T` is the outer iteration count, `T_inner` the inner steps per outer
/// iteration, and `alpha` the subset size (SP-SCD only).
pub fn flop_estimate(
    method: Method,
    p: u64,
    q: u64,
    n: u64,
    outer: u64,
    inner: u64,
    alpha: u64,
) -> Result<u128> {
    if p == 0 || n == 0 {
        return Err(IlsError::Parameter("flop model needs p, n >= 1".into()));
    }
    let (p, q, n, t, ti, a) = (
        i128::from(p),
        i128::from(q),
        i128::from(n),
        i128::from(outer),
        i128::from(inner),
        i128::from(alpha),
    );
    let m = p + q;
    let count = match method {
        Method::Sp => m * n * n + 4 * n * n * n + 2 * m * n + 2 * n * n - 2 * n + 2 * n * n * t,
        Method::SpRkRgs => {
            q * n * n + 2 * m * n - n + (2 * n * n + (2 * p * n + 6 * p + 2) * ti) * t
        }
        Method::Ussor => {
            m * n * n + 2 * n * n * n + 2 * m * n + 4 * p * n + 3 - 2 * n
                + (6 * q * n + 6 * n * n + 6 * q + 9 * n + 7) * t
        }
        Method::SpScd => m * n * n + 2 * m * n - n + (2 * n * n + (2 * n + 2 * a + 4) * ti) * t,
        other => {
            return Err(IlsError::Parameter(format!("no flop model for {other}")));
        }
    };
    u128::try_from(count).map_err(|_| IlsError::Parameter("flop count is negative".into()))
}

/// Writes a header plus one line per row.
pub fn export_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    write_csv(rows, std::fs::File::create(path)?)
}

pub fn write_csv<W: std::io::Write>(rows: &[ResultRow], w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub const CSV_HEADER: [&str; 12] = [
    "method",
    "m",
    "n",
    "p",
    "q",
    "IT",
    "IT_inner",
    "CPU",
    "CPU_inner",
    "RR_final",
    "converged_fraction",
    "speedup",
];

pub fn import_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in rdr.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}
