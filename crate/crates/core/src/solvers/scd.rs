//! Splitting outer loop with a sampling coordinate descent inner solve.
//!
//! The inner problem is `Ā₁ β = b̂` with `Ā₁ = A₁ᵀA₁`. Each step draws a
//! subset size α, a uniform α-subset τ of the coordinates, picks the
//! coordinate in τ with the largest squared residual and performs an exact
//! coordinate minimization along it:
//!
//! ```text
//! β[j] += r[j] / Ā₁[j,j],    r -= (r[j] / Ā₁[j,j]) Ā₁[:, j]
//! ```
//!
//! With α = 1 this is randomized coordinate descent with uniform index
//! choice, with α = n it is the greedy (Motzkin-style) rule. The adaptive
//! subset probability that the convergence analysis uses is exposed as
//! [`ExactScdSampler`], which is only practical for small `n`.

use std::time::Instant;

use crate::error::{IlsError, Result};
use crate::matrix::{axpy, norm2, DenseMatrix};
use crate::problem::IlsProblem;
use crate::sampling::{sample_alpha, AlphaPolicy, RngState, SubsetSampler, WeightedSampler};

use super::{drive, OuterStep, SolveReport, SolverConfig};

/// Largest `n` accepted by [`ExactScdSampler`].
pub const EXACT_SAMPLER_MAX_N: usize = 25;

fn diagonal_of(a1bar: &DenseMatrix) -> Result<Vec<f64>> {
    if !a1bar.is_square() {
        return Err(IlsError::Shape(format!(
            "Ā₁ must be square, got {}x{}",
            a1bar.rows(),
            a1bar.cols()
        )));
    }
    let diag = a1bar.diagonal();
    if let Some((index, &pivot)) = diag
        .iter()
        .enumerate()
        .find(|(_, &d)| d.is_nan() || d <= 0.0)
    {
        return Err(IlsError::RankDeficient { index, pivot });
    }
    Ok(diag)
}

/// `β` and the maintained residual `r = b̂ − Ā₁β` of one inner solve.
#[derive(Debug, Clone)]
pub struct ScdInnerState<'a> {
    a1bar: &'a DenseMatrix,
    bhat: &'a [f64],
    diag: Vec<f64>,
    beta: Vec<f64>,
    r: Vec<f64>,
}

impl<'a> ScdInnerState<'a> {
    /// Starts from `β₀ = 0`, `r₀ = b̂`.
    pub fn new(a1bar: &'a DenseMatrix, bhat: &'a [f64]) -> Result<Self> {
        let diag = diagonal_of(a1bar)?;
        Ok(Self::with_diagonal(a1bar, bhat, diag))
    }

    fn with_diagonal(a1bar: &'a DenseMatrix, bhat: &'a [f64], diag: Vec<f64>) -> Self {
        assert_eq!(bhat.len(), a1bar.rows(), "b̂ must have length n");
        Self {
            a1bar,
            bhat,
            diag,
            beta: vec![0.0; bhat.len()],
            r: bhat.to_vec(),
        }
    }

    /// Starts from an arbitrary `β`, with the residual computed exactly.
    pub fn from_beta(a1bar: &'a DenseMatrix, bhat: &'a [f64], beta: Vec<f64>) -> Result<Self> {
        let mut s = Self::new(a1bar, bhat)?;
        if beta.len() != bhat.len() {
            return Err(IlsError::Dimension("β must have length n".into()));
        }
        s.beta = beta;
        s.refresh_residual();
        Ok(s)
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn residual(&self) -> &[f64] {
        &self.r
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Exact coordinate minimization along `j`; returns the step on `β[j]`.
    pub fn rcd_step(&mut self, j: usize) -> Result<f64> {
        let d = *self
            .diag
            .get(j)
            .ok_or_else(|| IlsError::Parameter(format!("coordinate {j} out of range")))?;
        if d.is_nan() || d <= 0.0 {
            return Err(IlsError::RankDeficient { index: j, pivot: d });
        }
        let step = self.r[j] / d;
        if step != 0.0 {
            self.beta[j] += step;
            // Ā₁ is symmetric, so row j is column j.
            axpy(-step, self.a1bar.row(j), &mut self.r);
        }
        Ok(step)
    }

    /// `b̂ − Ā₁β` computed from scratch.
    pub fn recomputed_residual(&self) -> Vec<f64> {
        self.a1bar
            .matvec(&self.beta)
            .into_iter()
            .zip(self.bhat)
            .map(|(a, b)| b - a)
            .collect()
    }

    /// Replaces the maintained residual by a fresh one.
    pub fn refresh_residual(&mut self) {
        self.r = self.recomputed_residual();
    }

    pub fn residual_norm(&self) -> f64 {
        norm2(&self.r)
    }

    pub fn into_beta(self) -> Vec<f64> {
        self.beta
    }
}

/// Free-function form of [`ScdInnerState::rcd_step`].
pub fn rcd_step(state: &mut ScdInnerState<'_>, j: usize) -> Result<f64> {
    state.rcd_step(j)
}

/// Index in `tau` with the largest `r[s]²`; ties go to the smallest index.
pub fn scd_select_index(r: &[f64], tau: &[usize]) -> Result<usize> {
    let (&first, rest) = tau
        .split_first()
        .ok_or_else(|| IlsError::Parameter("index subset must be nonempty".into()))?;
    let mut best = first;
    let mut best_val = r[first] * r[first];
    for &s in rest {
        let v = r[s] * r[s];
        if v > best_val || (v == best_val && s < best) {
            best = s;
            best_val = v;
        }
    }
    Ok(best)
}

/// Production index selection: α from the policy, uniform α-subset, argmax.
#[derive(Debug, Clone)]
pub struct ScdSelector {
    subsets: SubsetSampler,
    policy: AlphaPolicy,
}

impl ScdSelector {
    pub fn new(n: usize, policy: AlphaPolicy) -> Result<Self> {
        policy.validate()?;
        Ok(Self {
            subsets: SubsetSampler::new(n),
            policy,
        })
    }

    pub fn select(&mut self, r: &[f64], rng: &mut RngState) -> Result<usize> {
        let alpha = sample_alpha(self.policy, self.subsets.n(), rng)?;
        let tau = self.subsets.sample(alpha, rng)?;
        scd_select_index(r, tau)
    }
}

fn run_inner(
    a1bar: &DenseMatrix,
    diag: &[f64],
    bhat: &[f64],
    cfg: &SolverConfig,
    rng: &mut RngState,
) -> Result<(Vec<f64>, usize)> {
    let n = bhat.len();
    let tol = cfg.inner_tol * norm2(bhat);
    let max_inner = cfg.max_inner_for(n);
    let check_every = cfg.check_every_for(n);
    let mut selector = ScdSelector::new(n, cfg.alpha_policy)?;
    let mut state = ScdInnerState::with_diagonal(a1bar, bhat, diag.to_vec());
    let mut t = 0;
    loop {
        if t % check_every == 0 {
            if t > 0 {
                state.refresh_residual();
            }
            if state.residual_norm() <= tol {
                break;
            }
        }
        if t == max_inner {
            break;
        }
        let j = selector.select(&state.r, rng)?;
        state.rcd_step(j)?;
        t += 1;
    }
    Ok((state.into_beta(), t))
}

/// Approximates `Ā₁⁻¹ b̂` from `β₀ = 0` until `‖r‖ <= inner_tol·‖b̂‖`
/// (checked every `check_every` steps on a recomputed residual) or
/// `max_inner` steps.
pub fn scd_inner(
    a1bar: &DenseMatrix,
    bhat: &[f64],
    cfg: &SolverConfig,
    rng: &mut RngState,
) -> Result<(Vec<f64>, usize)> {
    let diag = diagonal_of(a1bar)?;
    if bhat.len() != diag.len() {
        return Err(IlsError::Dimension("b̂ must have length n".into()));
    }
    run_inner(a1bar, &diag, bhat, cfg, rng)
}

/// Index distribution induced by the adaptive subset probability
///
/// ```text
/// p(τ) ∝ Ā₁[s(τ), s(τ)],   s(τ) = argmax_{s ∈ τ} r[s]²
/// ```
///
/// over all α-subsets τ. Drawing τ from `p` and returning `s(τ)` is the same
/// as drawing `j` with weight `Σ_{τ : s(τ) = j} Ā₁[j, j]`, which is what the
/// enumeration accumulates.
#[derive(Debug, Clone)]
pub struct ExactScdSampler {
    weights: WeightedSampler,
}

impl ExactScdSampler {
    pub fn new(a1bar: &DenseMatrix, r: &[f64], alpha: usize) -> Result<Self> {
        let diag = diagonal_of(a1bar)?;
        let n = diag.len();
        if n > EXACT_SAMPLER_MAX_N {
            return Err(IlsError::Capacity(format!(
                "exact subset enumeration supports n <= {EXACT_SAMPLER_MAX_N}, got {n}"
            )));
        }
        if r.len() != n {
            return Err(IlsError::Dimension("residual must have length n".into()));
        }
        if alpha == 0 || alpha > n {
            return Err(IlsError::Parameter(format!(
                "alpha {alpha} must lie in [1, {n}]"
            )));
        }
        let mut per_index = vec![0.0; n];
        for_each_combination(n, alpha, |tau| {
            let s = scd_select_index(r, tau).expect("alpha >= 1");
            per_index[s] += diag[s];
        });
        Ok(Self {
            weights: WeightedSampler::new(&per_index)?,
        })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.weights.len())
            .map(|j| self.weights.probability(j))
            .collect()
    }

    pub fn sample(&self, rng: &mut RngState) -> usize {
        self.weights.sample(rng)
    }
}

/// One draw from the exact adaptive sampler. Building the sampler costs
/// `C(n, α)` work; reuse an [`ExactScdSampler`] for repeated draws.
pub fn scd_exact_sampler(
    a1bar: &DenseMatrix,
    r: &[f64],
    alpha: usize,
    rng: &mut RngState,
) -> Result<usize> {
    Ok(ExactScdSampler::new(a1bar, r, alpha)?.sample(rng))
}

/// Calls `f` on every increasing `k`-combination of `0..n`.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn sp_scd_solve(prob: &IlsProblem, cfg: &SolverConfig) -> Result<SolveReport> {
    let mut rng = RngState::new(cfg.seed);
    sp_scd_solve_with_rng(prob, cfg, &mut rng)
}

pub fn sp_scd_solve_with_rng(
    prob: &IlsProblem,
    cfg: &SolverConfig,
    rng: &mut RngState,
) -> Result<SolveReport> {
    cfg.validate(prob.n())?;
    let started = Instant::now();
    let a1bar = prob.a1().gram();
    let diag = diagonal_of(&a1bar)?;
    let a2bar = prob.a2().gram();
    let bbar = prob.at_j_b();

    drive(prob, cfg, started, |x| {
        let mut bhat = a2bar.matvec(x);
        for (b, c) in bhat.iter_mut().zip(&bbar) {
            *b += c;
        }
        let inner_start = Instant::now();
        let (beta, t) = run_inner(&a1bar, &diag, &bhat, cfg, rng)?;
        Ok(OuterStep {
            x: beta,
            inner_iters: Some(t),
            inner_time: inner_start.elapsed(),
        })
    })
}
