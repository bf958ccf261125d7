//! The parameter-free splitting iteration
//!
//! ```text
//! A₁ᵀA₁ x_{k+1} = A₂ᵀA₂ x_k + AᵀJb,   i.e.   x_{k+1} = B x_k + c,
//! B = (A₁ᵀA₁)⁻¹ A₂ᵀA₂,   c = (A₁ᵀA₁)⁻¹ AᵀJb.
//! ```
//!
//! Neither `(A₁ᵀA₁)⁻¹` nor `B` is formed: applying `B` costs one `n×n`
//! product with `A₂ᵀA₂` and two triangular solves against the Cholesky
//! factor of `A₁ᵀA₁`. Whenever `A₁ᵀA₁ − A₂ᵀA₂` is SPD, `ρ(B) < 1` and the
//! iteration converges from any start.

use std::time::Instant;

use crate::error::{IlsError, Result};
use crate::linalg::Cholesky;
use crate::matrix::{dot, norm2, norm2_sq, DenseMatrix};
use crate::problem::IlsProblem;
use crate::sampling::RngState;

use super::{drive, OuterStep, SolveReport, SolverConfig};

#[derive(Debug, Clone)]
pub struct SpState {
    chol_a1: Cholesky,
    a2bar: DenseMatrix,
    c: Vec<f64>,
}

/// Factors `A₁ᵀA₁`, forms `A₂ᵀA₂` and `c`.
pub fn sp_precompute(prob: &IlsProblem) -> Result<SpState> {
    let chol_a1 = Cholesky::factor(&prob.a1().gram()).map_err(|e| IlsError::RankDeficient {
        index: e.index,
        pivot: e.pivot,
    })?;
    let a2bar = prob.a2().gram();
    let c = chol_a1.solve(&prob.at_j_b());
    Ok(SpState { chol_a1, a2bar, c })
}

impl SpState {
    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn cholesky_a1(&self) -> &Cholesky {
        &self.chol_a1
    }

    pub fn a2bar(&self) -> &DenseMatrix {
        &self.a2bar
    }

    /// `B v = (A₁ᵀA₁)⁻¹ (A₂ᵀA₂ v)`.
    pub fn apply_b(&self, v: &[f64]) -> Vec<f64> {
        let mut out = self.a2bar.matvec(v);
        self.chol_a1.solve_in_place(&mut out);
        out
    }

    /// `B x + c`.
    pub fn step(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.apply_b(x);
        for (o, ci) in out.iter_mut().zip(&self.c) {
            *o += ci;
        }
        out
    }
}

pub fn sp_step(state: &SpState, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != state.n() {
        return Err(IlsError::Dimension(format!(
            "iterate has length {}, expected {}",
            x.len(),
            state.n()
        )));
    }
    Ok(state.step(x))
}

pub fn sp_solve(prob: &IlsProblem, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate(prob.n())?;
    let started = Instant::now();
    let state = sp_precompute(prob)?;
    drive(prob, cfg, started, |x| Ok(OuterStep::plain(state.step(x))))
}

/// Power-iteration estimate of `ρ(B)`.
///
/// `B` is self-adjoint in the `A₁ᵀA₁` inner product and its eigenvalues are
/// nonnegative, so the generalized Rayleigh quotient
/// `vᵀ(A₂ᵀA₂)v / vᵀ(A₁ᵀA₁)v` of the power iterate converges to `ρ(B)` from
/// below, quadratically in the eigenvalue gap. Stops after `iters` steps or
/// when two successive estimates differ by less than `1e-10`.
pub fn sp_spectral_radius(state: &SpState, iters: usize, rng: &mut RngState) -> Result<f64> {
    if iters == 0 {
        return Err(IlsError::Parameter(
            "power iteration needs iters >= 1".into(),
        ));
    }
    let n = state.n();
    let mut v: Vec<f64> = (0..n).map(|_| rng.uniform() - 0.5).collect();
    let mut estimate = f64::NAN;
    for _ in 0..iters {
        let nrm = norm2(&v);
        if nrm == 0.0 {
            return Ok(0.0);
        }
        v.iter_mut().for_each(|x| *x /= nrm);

        let mut bv = state.a2bar.matvec(&v);
        let numerator = dot(&bv, &v);
        let denominator = norm2_sq(&state.chol_a1.lt_mul(&v));
        let next = numerator / denominator;
        state.chol_a1.solve_in_place(&mut bv);

        let done = (next - estimate).abs() < 1e-10;
        estimate = next;
        if done {
            break;
        }
        v = bv;
    }
    Ok(estimate)
}
