//! `ils`: run the indefinite least squares solvers on Matrix Market input or
//! on generated problem families, and tabulate averaged results as CSV.
//!
//! Exit status is 0 when every trial converged, 2 when some trial did not,
//! and 1 on any error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ils_core::harness::{ussor_preset, write_csv};
use ils_core::mm::{read_matrix, read_vector, write_matrix, write_vector};
use ils_core::{
    export_csv, gen_random_ils, run_trials, speedup, AlphaPolicy, DenseMatrix, ExperimentSpec,
    GenSpec, IlsProblem, Method, ProblemSource, ResultRow, RngState, SolverConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "ils",
    version,
    about = "Indefinite least squares solvers and benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a problem read from Matrix Market files.
    Solve(SolveArgs),
    /// Benchmark on a generated problem family.
    Bench(BenchArgs),
    /// Write a generated problem as Matrix Market files.
    Generate(GenerateArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    a1: PathBuf,
    /// Omit together with --b2 for an ordinary least squares problem.
    #[arg(long, requires = "b2")]
    a2: Option<PathBuf>,
    #[arg(long)]
    b1: PathBuf,
    #[arg(long, requires = "a2")]
    b2: Option<PathBuf>,
    /// Write the first trial's solution of the first method here.
    #[arg(long)]
    solution: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, default_value_t = 1000)]
    p: usize,
    #[arg(long, default_value_t = 100)]
    q: usize,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Scale of the identity block in A2.
    #[arg(long, default_value_t = 7.0)]
    nu: f64,
    /// Choose nu so that the splitting iteration contracts by this factor.
    #[arg(long)]
    target_rho: Option<f64>,
    /// Seed of the problem generator (defaults to --seed).
    #[arg(long)]
    problem_seed: Option<u64>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Draw a fresh problem for every trial.
    #[arg(long)]
    regenerate: bool,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for a1.mtx, a2.mtx, b1.mtx, b2.mtx.
    #[arg(long, default_value = ".")]
    dir: PathBuf,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Comma-separated methods; with several, speed-ups are relative to the first.
    #[arg(long, default_value = "sp", value_delimiter = ',')]
    method: Vec<Method>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Stop once the relative residual drops below this.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 20_000)]
    max_outer: usize,
    #[arg(long, default_value_t = 1e-8)]
    inner_tol: f64,
    /// Inner steps per outer iteration (default 100·n).
    #[arg(long)]
    max_inner: Option<usize>,
    /// Subset size rule for sp-scd: uniform or fixed:K.
    #[arg(long, default_value = "uniform")]
    alpha: AlphaPolicy,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    omega_hat: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run trials on a thread pool.
    #[arg(long)]
    parallel: bool,
    /// CSV destination; rows go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            outer_tol: self.tol,
            max_outer: self.max_outer,
            inner_tol: self.inner_tol,
            max_inner: self.max_inner,
            alpha_policy: self.alpha,
            seed: self.seed,
            ..SolverConfig::default()
        }
    }

    fn ussor_params(&self, dims: (usize, usize, usize)) -> Result<(f64, f64)> {
        match (self.omega, self.omega_hat) {
            (Some(w), Some(wh)) => Ok((w, wh)),
            (None, None) => ussor_preset(dims.0, dims.1, dims.2).with_context(|| {
                format!(
                    "ussor needs --omega and --omega-hat (no tabulated values for p={}, q={}, n={})",
                    dims.0, dims.1, dims.2
                )
            }),
            _ => bail!("--omega and --omega-hat must be given together"),
        }
    }
}

impl FamilyArgs {
    fn spec(&self, seed: u64) -> GenSpec {
        GenSpec {
            p: self.p,
            q: self.q,
            n: self.n,
            nu: self.nu,
            seed: self.problem_seed.unwrap_or(seed),
            target_rho: self.target_rho,
        }
    }
}

/// Runs every requested method and returns the rows, speed-ups filled in
/// relative to the first method when there are several, together with the
/// first method's trial-0 solution.
fn run_methods(
    run: &RunArgs,
    source: ProblemSource,
    regenerate: bool,
) -> Result<(Vec<ResultRow>, Vec<f64>)> {
    let mut rows: Vec<ResultRow> = Vec::new();
    let mut first_x = None;
    let (p, q, n) = source.dims();
    for &method in &run.method {
        let mut spec = ExperimentSpec::new(method, source.clone());
        spec.trials = run.trials;
        spec.cfg = run.config();
        spec.parallel = run.parallel;
        spec.regenerate_per_trial = regenerate;
        if method == Method::Ussor {
            spec.ussor_params = Some(run.ussor_params(source.dims())?);
        }
        let reports = run_trials(&spec).with_context(|| format!("method {method}"))?;
        rows.push(ResultRow::from_reports(method, p, q, n, &reports));
        if first_x.is_none() {
            first_x = reports.into_iter().next().map(|r| r.x);
        }
    }
    if rows.len() > 1 {
        let baseline = rows[0].clone();
        for row in &mut rows {
            row.speedup = speedup(&baseline, row).ok();
        }
    }
    Ok((rows, first_x.unwrap_or_default()))
}

fn emit(rows: &[ResultRow], out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            export_csv(rows, path).with_context(|| format!("writing {}", path.display()))?;
            for r in rows {
                eprintln!(
                    "{:<14} IT {:>9.2}  IT_inner {:>12.1}  CPU {:>10.4}s  RR {:.3e}  converged {:.0}%",
                    r.method,
                    r.it,
                    r.it_inner,
                    r.cpu,
                    r.rr_final,
                    100.0 * r.converged_fraction
                );
            }
            Ok(())
        }
        None => Ok(write_csv(rows, std::io::stdout().lock())?),
    }
}

fn load_problem(args: &SolveArgs) -> Result<IlsProblem> {
    let read_m = |p: &PathBuf| read_matrix(p).with_context(|| format!("reading {}", p.display()));
    let read_v = |p: &PathBuf| read_vector(p).with_context(|| format!("reading {}", p.display()));
    let a1 = read_m(&args.a1)?;
    let b1 = read_v(&args.b1)?;
    let (a2, b2) = match (&args.a2, &args.b2) {
        (Some(a2), Some(b2)) => (read_m(a2)?, read_v(b2)?),
        _ => (DenseMatrix::zeros(0, a1.cols()), Vec::new()),
    };
    Ok(IlsProblem::new(a1, a2, b1, b2)?)
}

fn solve(args: &SolveArgs) -> Result<bool> {
    let prob = Arc::new(load_problem(args)?);
    let (rows, x) = run_methods(&args.run, ProblemSource::Given(prob), false)?;
    if let Some(path) = &args.solution {
        write_vector(path, &x).with_context(|| format!("writing {}", path.display()))?;
    }
    emit(&rows, args.run.out.as_ref())?;
    Ok(rows.iter().all(ResultRow::all_converged))
}

fn bench(args: &BenchArgs) -> Result<bool> {
    let source = ProblemSource::Generated(args.family.spec(args.run.seed));
    let (rows, _) = run_methods(&args.run, source, args.regenerate)?;
    emit(&rows, args.run.out.as_ref())?;
    Ok(rows.iter().all(ResultRow::all_converged))
}

fn generate(args: &GenerateArgs) -> Result<bool> {
    let spec = args.family.spec(args.seed);
    let prob = gen_random_ils(&spec, &mut RngState::new(spec.seed))?;
    std::fs::create_dir_all(&args.dir)?;
    write_matrix(args.dir.join("a1.mtx"), prob.a1())?;
    write_matrix(args.dir.join("a2.mtx"), prob.a2())?;
    write_vector(args.dir.join("b1.mtx"), prob.b1())?;
    write_vector(args.dir.join("b2.mtx"), prob.b2())?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Generate(a) => generate(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
