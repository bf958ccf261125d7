//! Acceptance suite. Runs each criterion in turn, prints one PASS/FAIL line
//! per criterion and exits nonzero if any failed.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use ils_core::harness::{
    flop_estimate, run_trials, speedup, ExperimentSpec, Method, ProblemSource, ResultRow,
};
use ils_core::solvers::rk_rgs::{A1Columns, RkRgsInnerState};
use ils_core::solvers::scd::{ExactScdSampler, ScdInnerState, ScdSelector};
use ils_core::{
    check_spd, normal_matrix, relative_residual, solve_normal_direct, solve_qr_cholesky,
    sp_precompute, sp_rk_rgs_solve, sp_scd_solve, sp_solve, sp_spectral_radius, ussor_solve,
    AlphaPolicy, DenseMatrix, GenSpec, IlsError, IlsProblem, RngState, SolverConfig,
};
use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Outcome = Result<String, String>;

const INSTANCES: u64 = 100;

fn instances() -> Vec<IlsProblem> {
    (0..INSTANCES).map(|s| random_instance(s).0).collect()
}

fn within_x_tol(x: &[f64], x_direct: &[f64]) -> bool {
    dist(x, x_direct) <= 1e-3 * (1.0 + norm(x_direct))
}

fn c1_oracle_equivalence(probs: &[IlsProblem]) -> Outcome {
    // The first iterate with RR < 1e-6 is only accurate to about
    // κ(M)·√RR, so the solves run on to 1e-14 and both checks are applied
    // to the final iterate.
    let cfg = SolverConfig {
        outer_tol: 1e-14,
        inner_tol: 1e-11,
        max_inner: Some(50_000_000),
        ..SolverConfig::default()
    };
    let mut passes = [0usize; 4];
    let mut notes = Vec::new();
    for (i, prob) in probs.iter().enumerate() {
        let xd = solve_normal_direct(prob).map_err(|e| format!("instance {i}: {e}"))?;
        let seeded = SolverConfig {
            seed: i as u64,
            ..cfg.clone()
        };
        let reports = [
            sp_solve(prob, &seeded),
            sp_rk_rgs_solve(prob, &seeded),
            sp_scd_solve(prob, &seeded),
            ussor_solve(prob, 0.5, 1.0, &seeded),
        ];
        for (k, r) in reports.into_iter().enumerate() {
            let r = r.map_err(|e| format!("instance {i}, method {k}: {e}"))?;
            let ok =
                r.converged && r.final_rr().is_some_and(|v| v < 1e-6) && within_x_tol(&r.x, &xd);
            if ok {
                passes[k] += 1;
            } else if notes.len() < 5 {
                notes.push(format!(
                    "#{i} {} (n={}, p={}, q={}) rr={:?} err={:.2e}",
                    ["sp", "sp-rk-rgs", "sp-scd", "ussor"][k],
                    prob.n(),
                    prob.p(),
                    prob.q(),
                    r.final_rr(),
                    dist(&r.x, &xd) / (1.0 + norm(&xd))
                ));
            }
        }
    }
    let n = probs.len();
    let summary = format!(
        "sp {}/{n}, sp-rk-rgs {}/{n}, sp-scd {}/{n}, ussor {}/{n}",
        passes[0], passes[1], passes[2], passes[3]
    );
    let ok = passes[0] == n && passes[3] == n && passes[1] >= 98 && passes[2] >= 98;
    if ok {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", notes.join("; ")))
    }
}

fn c2_direct_cross_check(probs: &[IlsProblem]) -> Outcome {
    let mut worst = 0.0f64;
    for (i, prob) in probs.iter().enumerate() {
        let xn = solve_normal_direct(prob).map_err(|e| format!("instance {i}: {e}"))?;
        let xq = solve_qr_cholesky(prob).map_err(|e| format!("instance {i}: {e}"))?;
        let rel = dist(&xq, &xn) / (1.0 + norm(&xn));
        worst = worst.max(rel);
        if rel > 1e-8 {
            return Err(format!("instance {i}: relative gap {rel:.3e} > 1e-8"));
        }
    }
    Ok(format!("worst relative gap {worst:.2e}"))
}

fn c3_spectral_radius(probs: &[IlsProblem]) -> Outcome {
    let mut worst_gap = 0.0f64;
    let mut max_rho = 0.0f64;
    for (i, prob) in probs.iter().enumerate() {
        let state = sp_precompute(prob).map_err(|e| format!("instance {i}: {e}"))?;
        let est = sp_spectral_radius(&state, 100_000, &mut RngState::new(i as u64))
            .map_err(|e| e.to_string())?;
        let exact = oracle_spectral_radius(prob);
        if est >= 1.0 {
            return Err(format!("instance {i}: estimate {est} >= 1"));
        }
        let gap = (est - exact).abs();
        if gap > 1e-6 {
            return Err(format!(
                "instance {i}: estimate {est} vs eigensolve {exact}"
            ));
        }
        worst_gap = worst_gap.max(gap);
        max_rho = max_rho.max(est);
    }

    for s in 0..20u64 {
        let mut rng = RngState::new(50_000 + s);
        let n = 2 + rng.below(29);
        let p = n + rng.below(2 * n + 1);
        let a1 = uniform_matrix(p, n, &mut rng);
        let g = to_na(&a1).transpose() * to_na(&a1);
        let lambda_min = sym_eigenvalues(&g)[0];
        let nu = (2.0 * lambda_min).sqrt();
        let a2 = DenseMatrix::from_fn(n, n, |i, j| if i == j { nu } else { 0.0 });
        let prob = IlsProblem::new(a1, a2, uniform_vec(p, &mut rng), uniform_vec(n, &mut rng))
            .map_err(|e| e.to_string())?;
        if check_spd(&normal_matrix(&prob)).map_err(|e| e.to_string())? {
            return Err(format!("constructed instance {s} is unexpectedly SPD"));
        }
        match sp_precompute(&prob) {
            Err(_) => {}
            Ok(state) => {
                let est =
                    sp_spectral_radius(&state, 100_000, &mut rng).map_err(|e| e.to_string())?;
                if est < 1.0 {
                    return Err(format!("non-SPD instance {s}: estimate {est} < 1"));
                }
            }
        }
    }
    Ok(format!(
        "max rho {max_rho:.4} on well-posed set, worst eigensolve gap {worst_gap:.1e}, 20/20 non-SPD flagged"
    ))
}

fn c4_desk_scale_sp() -> Outcome {
    let gen = GenSpec {
        p: 1000,
        q: 100,
        n: 100,
        nu: 7.0,
        seed: 2024,
        target_rho: Some(0.2),
    };
    let mut spec = ExperimentSpec::new(Method::Sp, ProblemSource::Generated(gen));
    spec.regenerate_per_trial = true;
    let reports = run_trials(&spec).map_err(|e| e.to_string())?;
    let max_it = reports.iter().map(|r| r.outer_iters).max().unwrap_or(0);
    let mean_it = reports.iter().map(|r| r.outer_iters as f64).sum::<f64>() / reports.len() as f64;
    if reports.len() != 10 || !reports.iter().all(|r| r.converged) {
        return Err("not every trial converged".into());
    }
    if max_it > 3 {
        return Err(format!("IT up to {max_it} (> 3)"));
    }
    Ok(format!(
        "10/10 converged, mean IT {mean_it:.1}, max IT {max_it}"
    ))
}

fn c5_energy_identity() -> Outcome {
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for s in 0..20u64 {
        let mut rng = RngState::new(60_000 + s);
        let n = 2 + rng.below(19);
        let p = 2 * n + rng.below(n + 1);
        let a1 = uniform_matrix(p, n, &mut rng);
        let bhat = uniform_vec(n, &mut rng);
        let a1bar = a1.gram();
        let a1_na = to_na(&a1);
        let beta_star = to_na(&a1bar)
            .lu()
            .solve(&DVector::from_column_slice(&bhat))
            .ok_or("singular Gram matrix")?;
        let energy = |beta: &[f64]| -> f64 {
            let d = DVector::from_column_slice(beta) - &beta_star;
            (&a1_na * d).norm_squared()
        };
        let mut state = ScdInnerState::new(&a1bar, &bhat).map_err(|e| e.to_string())?;
        let mut selector = ScdSelector::new(n, AlphaPolicy::Uniform).map_err(|e| e.to_string())?;
        let e0 = energy(state.beta());
        let mut e_prev = e0;
        for _ in 0..2_000 {
            if e_prev < 1e-6 * e0 {
                break;
            }
            let j = selector
                .select(state.residual(), &mut rng)
                .map_err(|e| e.to_string())?;
            let r_j = state.residual()[j];
            let d_j = a1bar.get(j, j);
            state.rcd_step(j).map_err(|e| e.to_string())?;
            let e_next = energy(state.beta());
            let predicted = e_prev - r_j * r_j / d_j;
            let rel = (e_next - predicted).abs() / e_prev;
            worst = worst.max(rel);
            if rel > 1e-9 {
                return Err(format!(
                    "instance {s}, step {checked}: relative mismatch {rel:.3e}"
                ));
            }
            e_prev = e_next;
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} steps on 20 instances, worst relative mismatch {worst:.1e}"
    ))
}

fn c6_rcd_reduction() -> Outcome {
    let mut worst = 0.0f64;
    for s in 0..10u64 {
        let mut rng = RngState::new(70_000 + s);
        let n = 2 + rng.below(19);
        let p = n + rng.below(2 * n + 1);
        let a1 = uniform_matrix(p, n, &mut rng);
        let bhat = uniform_vec(n, &mut rng);
        let cols = A1Columns::new(&a1).map_err(|e| e.to_string())?;
        let a1bar = a1.gram();
        let mut pair = RkRgsInnerState::new(&cols, &bhat);
        let mut rcd = ScdInnerState::new(&a1bar, &bhat).map_err(|e| e.to_string())?;
        for t in 0..1_000 {
            let j = rng.below(n);
            pair.rk_step(j);
            pair.rgs_step(j);
            rcd.rcd_step(j).map_err(|e| e.to_string())?;
            let gap = pair
                .z()
                .iter()
                .zip(rcd.beta())
                .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            worst = worst.max(gap);
            if gap > 1e-12 {
                return Err(format!("instance {s}, step {t}: gap {gap:.3e}"));
            }
        }
    }
    Ok(format!("10^4 forced steps, worst absolute gap {worst:.1e}"))
}

/// Chi-square goodness of fit over the cells with positive expected count.
/// Cells expecting fewer than five draws are pooled.
fn chi_square_p(observed: &[usize], probs: &[f64]) -> Result<f64, String> {
    let total: usize = observed.iter().sum();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for (&o, &pr) in observed.iter().zip(probs) {
        let e = pr * total as f64;
        if pr == 0.0 {
            if o != 0 {
                return Err(format!("{o} draws landed on a zero-probability index"));
            }
        } else if e < 5.0 {
            pooled.0 += o as f64;
            pooled.1 += e;
        } else {
            cells.push((o as f64, e));
        }
    }
    if pooled.1 > 0.0 {
        cells.push(pooled);
    }
    if cells.len() < 2 {
        return Ok(1.0);
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dist = ChiSquared::new((cells.len() - 1) as f64).map_err(|e| e.to_string())?;
    Ok(1.0 - dist.cdf(stat))
}

fn c7_distributional_checks() -> Outcome {
    const DRAWS: usize = 100_000;
    let mut min_p = 1.0f64;
    for s in 0..3u64 {
        let mut rng = RngState::new(80_000 + s);
        let n = 4 + rng.below(9);
        let p = 2 * n;
        let a1 = uniform_matrix(p, n, &mut rng);
        let a1bar = a1.gram();
        let r: Vec<f64> = (0..n).map(|_| rng.uniform() - 0.5).collect();

        // α = 1: squared column norms of A₁.
        let col_sq: Vec<f64> = (0..n)
            .map(|j| a1.column(j).iter().map(|v| v * v).sum())
            .collect();
        let fro: f64 = col_sq.iter().sum();
        let expected: Vec<f64> = col_sq.iter().map(|c| c / fro).collect();
        let sampler = ExactScdSampler::new(&a1bar, &r, 1).map_err(|e| e.to_string())?;
        let mut counts = vec![0usize; n];
        for _ in 0..DRAWS {
            counts[sampler.sample(&mut rng)] += 1;
        }
        let pv = chi_square_p(&counts, &expected)?;
        if pv <= 0.001 {
            return Err(format!("alpha=1, instance {s}: p-value {pv:.2e}"));
        }
        min_p = min_p.min(pv);

        // α = n: the global argmax of r², every time.
        let argmax = (0..n)
            .max_by(|&a, &b| (r[a] * r[a]).partial_cmp(&(r[b] * r[b])).unwrap())
            .unwrap();
        let sampler = ExactScdSampler::new(&a1bar, &r, n).map_err(|e| e.to_string())?;
        if (0..DRAWS).any(|_| sampler.sample(&mut rng) != argmax) {
            return Err(format!(
                "alpha=n, instance {s}: draw differs from argmax {argmax}"
            ));
        }

        // Equal diagonal: the exact sampler and the uniform-subset production
        // path both follow the rank law C(n-1-k, α-1) / C(n, α), where k is
        // the rank of |r[j]| from the top.
        let unit = DenseMatrix::from_fn(p, n, |i, j| a1.get(i, j) / col_sq[j].sqrt());
        let unit_bar = unit.gram();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| r[b].abs().partial_cmp(&r[a].abs()).unwrap());
        for alpha in [1, 2, n / 2, n - 1] {
            let mut law = vec![0.0; n];
            for (k, &j) in order.iter().enumerate() {
                law[j] = binomial(n - 1 - k, alpha - 1) / binomial(n, alpha);
            }
            let exact = ExactScdSampler::new(&unit_bar, &r, alpha).map_err(|e| e.to_string())?;
            let probs = exact.probabilities();
            if probs.iter().zip(&law).any(|(a, b)| (a - b).abs() > 1e-12) {
                return Err(format!(
                    "alpha={alpha}: exact probabilities differ from the rank law"
                ));
            }
            let mut exact_counts = vec![0usize; n];
            let mut prod_counts = vec![0usize; n];
            let mut selector =
                ScdSelector::new(n, AlphaPolicy::Fixed(alpha)).map_err(|e| e.to_string())?;
            for _ in 0..DRAWS {
                exact_counts[exact.sample(&mut rng)] += 1;
                prod_counts[selector.select(&r, &mut rng).map_err(|e| e.to_string())?] += 1;
            }
            for (label, counts) in [("exact", &exact_counts), ("production", &prod_counts)] {
                let pv = chi_square_p(counts, &law)?;
                if pv <= 0.001 {
                    return Err(format!(
                        "equal diagonal, alpha={alpha}, {label}: p-value {pv:.2e}"
                    ));
                }
                min_p = min_p.min(pv);
            }
        }
    }
    Ok(format!(
        "all chi-square p-values > 0.001 (min {min_p:.3}), alpha=n deterministic"
    ))
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn c8_rk_rate() -> Outcome {
    const STEPS: usize = 200;
    let mut rng = RngState::new(90_000);
    let a1 = uniform_matrix(40, 10, &mut rng);
    let bhat = uniform_vec(10, &mut rng);
    let a = to_na(&a1);
    let svd = a.clone().svd(false, false);
    let sigma_min = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let fro_sq = a.norm_squared();
    let bound = 3.0 * (1.0 - sigma_min * sigma_min / fro_sq).powi(STEPS as i32);

    let g = a.transpose() * &a;
    let w_star = &a
        * g.lu()
            .solve(&DVector::from_column_slice(&bhat))
            .ok_or("singular")?;
    let w_star = to_vec(&w_star);
    let e0 = norm(&w_star).powi(2);

    let cols = A1Columns::new(&a1).map_err(|e| e.to_string())?;
    let sampler = cols.sampler();
    let mut ratios: Vec<f64> = (0..200u64)
        .map(|seed| {
            let mut rng = RngState::new(seed);
            let mut state = RkRgsInnerState::new(&cols, &bhat);
            for _ in 0..STEPS {
                state.rk_step(sampler.sample(&mut rng));
            }
            dist(state.w(), &w_star).powi(2) / e0
        })
        .collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = 0.5 * (ratios[99] + ratios[100]);
    if median <= bound {
        Ok(format!("median ratio {median:.3e} <= bound {bound:.3e}"))
    } else {
        Err(format!("median ratio {median:.3e} > bound {bound:.3e}"))
    }
}

fn c9_range_invariant() -> Outcome {
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for s in 0..10u64 {
        let mut rng = RngState::new(100_000 + s);
        let n = 2 + rng.below(19);
        let p = n + 1 + rng.below(2 * n);
        let a1 = uniform_matrix(p, n, &mut rng);
        let bhat = uniform_vec(n, &mut rng);
        let svd = to_na(&a1).svd(true, false);
        let u: DMatrix<f64> = svd.u.ok_or("SVD without U")?;
        let proj = &u * u.transpose();
        let cols = A1Columns::new(&a1).map_err(|e| e.to_string())?;
        let sampler = cols.sampler();
        let mut state = RkRgsInnerState::new(&cols, &bhat);
        for _ in 0..2_000 {
            state.rk_step(sampler.sample(&mut rng));
            state.rgs_step(sampler.sample(&mut rng));
            let w = DVector::from_column_slice(state.w());
            let off = (&w - &proj * &w).norm();
            let rel = off / (1.0 + w.norm());
            worst = worst.max(rel);
            if rel > 1e-10 {
                return Err(format!("instance {s}: off-range component {off:.3e}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} iterates checked, worst {worst:.1e}"))
}

fn table_row(cpu: f64) -> ResultRow {
    ResultRow {
        method: "x".into(),
        m: 43000,
        n: 13000,
        p: 30000,
        q: 13000,
        it: 1.0,
        it_inner: 0.0,
        cpu,
        cpu_inner: 0.0,
        rr_final: 0.0,
        converged_fraction: 1.0,
        speedup: None,
    }
}

fn c10_speedup() -> Outcome {
    let cases = [(1974.0, 559.3, 3.5294), (2938.5, 324.5609, 9.0538)];
    let mut got = Vec::new();
    for (base, other, reported) in cases {
        let s = speedup(&table_row(base), &table_row(other)).map_err(|e| e.to_string())?;
        if (s - reported).abs() > 5e-4 {
            return Err(format!("{base}/{other} = {s}, reported {reported}"));
        }
        got.push(format!("{s:.4}"));
    }
    if !matches!(
        speedup(&table_row(1.0), &table_row(0.0)),
        Err(IlsError::Measurement(_))
    ) {
        return Err("zero CPU was not rejected".into());
    }
    Ok(format!("ratios {}", got.join(", ")))
}

fn c11_flop_model() -> Outcome {
    // (p, q, n, T) with T_inner = T and α = n.
    type Case = ((u64, u64, u64, u64), [u128; 4]);
    let expected: [Case; 3] = [
        ((1, 1, 1, 1), [12, 16, 47, 15]),
        ((10, 5, 3, 2), [381, 656, 812, 322]),
        ((100, 100, 50, 4), [1_044_900, 459_582, 974_131, 543_214]),
    ];
    let methods = [Method::Sp, Method::SpRkRgs, Method::Ussor, Method::SpScd];
    for ((p, q, n, t), values) in expected {
        for (method, want) in methods.iter().zip(values) {
            let got = flop_estimate(*method, p, q, n, t, t, n).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("{method} at ({p},{q},{n},{t}): {got} != {want}"));
            }
        }
    }
    Ok("12/12 values exact".into())
}

fn c12_reproducibility() -> Outcome {
    let gen = GenSpec {
        p: 90,
        q: 12,
        n: 15,
        nu: 1.0,
        seed: 7,
        target_rho: Some(0.3),
    };
    let given = Arc::new(ils_core::generate(&gen).map_err(|e| e.to_string())?);
    let mut compared = 0;
    for method in Method::ALL {
        for source in [
            ProblemSource::Generated(gen.clone()),
            ProblemSource::Given(Arc::clone(&given)),
        ] {
            let mut spec = ExperimentSpec::new(method, source);
            spec.trials = 4;
            spec.cfg.seed = 11;
            spec.cfg.max_inner = Some(1_000_000);
            if method == Method::Ussor {
                spec.ussor_params = Some((0.5, 1.0));
            }
            let first = run_trials(&spec).map_err(|e| e.to_string())?;
            let second = run_trials(&spec).map_err(|e| e.to_string())?;
            spec.parallel = true;
            let par = run_trials(&spec).map_err(|e| e.to_string())?;
            for other in [&second, &par] {
                for (a, b) in first.iter().zip(other.iter()) {
                    let same = a.outer_iters == b.outer_iters
                        && a.inner_iters_total == b.inner_iters_total
                        && a.inner_iters == b.inner_iters
                        && a.final_rr().map(f64::to_bits) == b.final_rr().map(f64::to_bits)
                        && a.x == b.x;
                    if !same {
                        return Err(format!("{method}: trial outputs differ between runs"));
                    }
                }
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} experiment specs identical across reruns and parallel mode"
    ))
}

fn main() -> ExitCode {
    let probs = instances();
    for (i, p) in probs.iter().enumerate() {
        let rr = relative_residual(p, &solve_normal_direct(p).unwrap()).unwrap();
        assert!(rr.is_finite(), "instance {i} is degenerate");
    }

    type Criterion<'a> = (u32, &'a str, Option<u64>, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "oracle equivalence of the iterative solvers",
            Some(60),
            Box::new(|| c1_oracle_equivalence(&probs)),
        ),
        (
            2,
            "QR-Cholesky agrees with normal-equation Cholesky",
            Some(10),
            Box::new(|| c2_direct_cross_check(&probs)),
        ),
        (
            3,
            "spectral radius below one iff well posed",
            Some(30),
            Box::new(|| c3_spectral_radius(&probs)),
        ),
        (
            4,
            "desk-scale SP converges within three iterations",
            Some(30),
            Box::new(c4_desk_scale_sp),
        ),
        (
            5,
            "SCD per-step energy identity",
            Some(5),
            Box::new(c5_energy_identity),
        ),
        (
            6,
            "forced-index RK-RGS equals RCD",
            Some(5),
            Box::new(c6_rcd_reduction),
        ),
        (
            7,
            "adaptive subset sampler special cases",
            Some(30),
            Box::new(c7_distributional_checks),
        ),
        (8, "RK expected linear rate", Some(30), Box::new(c8_rk_rate)),
        (
            9,
            "RK iterates stay in range(A1)",
            Some(10),
            Box::new(c9_range_invariant),
        ),
        (10, "speed-up ratios", Some(1), Box::new(c10_speedup)),
        (11, "flop-count polynomials", None, Box::new(c11_flop_model)),
        (
            12,
            "reproducibility across reruns and parallelism",
            None,
            Box::new(c12_reproducibility),
        ),
    ];

    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if limit.is_some_and(|l| elapsed > Duration::from_secs(l)) => Err(format!(
                "{msg}; took {:.2}s, limit {}s",
                elapsed.as_secs_f64(),
                limit.unwrap_or_default()
            )),
            other => other,
        };
        let (tag, msg) = match outcome {
            Ok(msg) => ("PASS", msg),
            Err(msg) => {
                failed += 1;
                ("FAIL", msg)
            }
        };
        println!(
            "criterion {id:>2} [{tag}] {name}: {msg} ({:.2}s)",
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        println!("acceptance: 12/12 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 12 criteria failed");
        ExitCode::FAILURE
    }
}
