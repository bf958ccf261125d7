//! Splitting outer loop with an alternating randomized Kaczmarz /
//! randomized Gauss–Seidel inner solve.
//!
//! Each outer step needs `x_{k+1} = (A₁ᵀA₁)⁻¹ b̂` with `b̂ = A₂ᵀA₂ x_k + AᵀJb`.
//! That system is split into `A₁ᵀ w = b̂` (underdetermined, solved by RK
//! towards its least-norm solution) and `A₁ z = w` (overdetermined, solved
//! by RGS). One RK step and one RGS step make one inner iteration; both only
//! touch columns of `A₁`, so `A₁` is kept column-contiguous.

use std::time::Instant;

use crate::error::{IlsError, Result};
use crate::matrix::{axpy, dot, norm2, DenseMatrix};
use crate::problem::IlsProblem;
use crate::sampling::{RngState, WeightedSampler};

use super::{drive, OuterStep, SolveReport, SolverConfig};

/// `A₁` stored by columns, with squared column norms.
#[derive(Debug, Clone)]
pub struct A1Columns {
    cols: DenseMatrix,
    norms_sq: Vec<f64>,
}

impl A1Columns {
    pub fn new(a1: &DenseMatrix) -> Result<Self> {
        let cols = a1.transpose();
        let norms_sq: Vec<f64> = (0..cols.rows())
            .map(|j| dot(cols.row(j), cols.row(j)))
            .collect();
        if let Some(j) = norms_sq.iter().position(|&v| v == 0.0) {
            return Err(IlsError::ZeroColumn(j));
        }
        Ok(Self { cols, norms_sq })
    }

    /// Number of columns `n`.
    pub fn n(&self) -> usize {
        self.cols.rows()
    }

    /// Column length `p`.
    pub fn p(&self) -> usize {
        self.cols.cols()
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        self.cols.row(j)
    }

    pub fn norms_sq(&self) -> &[f64] {
        &self.norms_sq
    }

    /// Column sampler with probabilities `‖A₁_(j)‖² / ‖A₁‖_F²`.
    pub fn sampler(&self) -> WeightedSampler {
        WeightedSampler::new(&self.norms_sq).expect("column norms are positive")
    }

    /// `A₁ z`.
    pub fn mul(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.p()];
        for (j, &zj) in z.iter().enumerate() {
            if zj != 0.0 {
                axpy(zj, self.column(j), &mut out);
            }
        }
        out
    }

    /// `A₁ᵀ v`.
    pub fn tr_mul(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n()).map(|j| dot(self.column(j), v)).collect()
    }
}

/// Projects `w` onto `{w : ⟨col, w⟩ = target}`.
#[inline]
fn kaczmarz_update(col: &[f64], norm_sq: f64, target: f64, w: &mut [f64]) -> f64 {
    let coef = (target - dot(col, w)) / norm_sq;
    axpy(coef, col, w);
    coef
}

/// Gauss–Seidel coordinate step on `A₁ z = w`; returns the step applied to
/// `z[j]` and updates `az` alongside.
#[inline]
fn gauss_seidel_update(col: &[f64], norm_sq: f64, w: &[f64], az: &mut [f64]) -> f64 {
    let inner: f64 = col
        .iter()
        .zip(w)
        .zip(az.iter())
        .map(|((c, wi), ai)| c * (wi - ai))
        .sum();
    let step = inner / norm_sq;
    axpy(step, col, az);
    step
}

fn checked_column(a1: &DenseMatrix, j: usize) -> Result<(Vec<f64>, f64)> {
    if j >= a1.cols() {
        return Err(IlsError::Parameter(format!(
            "column index {j} out of range"
        )));
    }
    let col = a1.column(j);
    let norm_sq = dot(&col, &col);
    if norm_sq == 0.0 {
        return Err(IlsError::ZeroColumn(j));
    }
    Ok((col, norm_sq))
}

/// One Kaczmarz projection for `A₁ᵀ w = b̂` along row `j1` of `A₁ᵀ`
/// (column `j1` of `A₁`).
pub fn rk_step(a1: &DenseMatrix, bhat: &[f64], w: &[f64], j1: usize) -> Result<Vec<f64>> {
    if bhat.len() != a1.cols() || w.len() != a1.rows() {
        return Err(IlsError::Dimension(
            "rk_step: bhat must have length n, w length p".into(),
        ));
    }
    let (col, norm_sq) = checked_column(a1, j1)?;
    let mut w = w.to_vec();
    kaczmarz_update(&col, norm_sq, bhat[j1], &mut w);
    Ok(w)
}

/// One Gauss–Seidel update of coordinate `j2` for `A₁ z = w`, given
/// `az = A₁ z`. Returns the new `(z, az)`.
pub fn rgs_step(
    a1: &DenseMatrix,
    w: &[f64],
    z: &[f64],
    az: &[f64],
    j2: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if w.len() != a1.rows() || az.len() != a1.rows() || z.len() != a1.cols() {
        return Err(IlsError::Dimension(
            "rgs_step: w, az must have length p, z length n".into(),
        ));
    }
    let (col, norm_sq) = checked_column(a1, j2)?;
    let mut z = z.to_vec();
    let mut az = az.to_vec();
    z[j2] += gauss_seidel_update(&col, norm_sq, w, &mut az);
    Ok((z, az))
}

/// Iterates of one inner solve, starting from `z₀ = w₀ = 0`.
#[derive(Debug, Clone)]
pub struct RkRgsInnerState<'a> {
    a1: &'a A1Columns,
    bhat: &'a [f64],
    w: Vec<f64>,
    z: Vec<f64>,
    az: Vec<f64>,
}

impl<'a> RkRgsInnerState<'a> {
    pub fn new(a1: &'a A1Columns, bhat: &'a [f64]) -> Self {
        assert_eq!(bhat.len(), a1.n(), "b̂ must have length n");
        Self {
            a1,
            bhat,
            w: vec![0.0; a1.p()],
            z: vec![0.0; a1.n()],
            az: vec![0.0; a1.p()],
        }
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// The incrementally maintained `A₁ z`.
    pub fn az(&self) -> &[f64] {
        &self.az
    }

    pub fn rk_step(&mut self, j1: usize) -> f64 {
        kaczmarz_update(
            self.a1.column(j1),
            self.a1.norms_sq[j1],
            self.bhat[j1],
            &mut self.w,
        )
    }

    pub fn rgs_step(&mut self, j2: usize) -> f64 {
        let step = gauss_seidel_update(
            self.a1.column(j2),
            self.a1.norms_sq[j2],
            &self.w,
            &mut self.az,
        );
        self.z[j2] += step;
        step
    }

    /// Recomputes `A₁ z` from scratch, discarding accumulated drift.
    pub fn refresh_product(&mut self) {
        self.az = self.a1.mul(&self.z);
    }

    /// `‖A₁ᵀA₁ z − b̂‖₂` using the current `az`.
    pub fn normal_residual_norm(&self) -> f64 {
        let g = self.a1.tr_mul(&self.az);
        g.iter()
            .zip(self.bhat)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn into_z(self) -> Vec<f64> {
        self.z
    }
}

/// Inner solve against precomputed columns and sampler.
pub(crate) fn run_inner(
    a1: &A1Columns,
    sampler: &WeightedSampler,
    bhat: &[f64],
    cfg: &SolverConfig,
    rng: &mut RngState,
) -> (Vec<f64>, usize) {
    let n = a1.n();
    let tol = cfg.inner_tol * norm2(bhat);
    let max_inner = cfg.max_inner_for(n);
    let check_every = cfg.check_every_for(n);
    let mut state = RkRgsInnerState::new(a1, bhat);
    let mut t = 0;
    loop {
        if t % check_every == 0 {
            state.refresh_product();
            if state.normal_residual_norm() <= tol {
                break;
            }
        }
        if t == max_inner {
            break;
        }
        let j1 = sampler.sample(rng);
        state.rk_step(j1);
        let j2 = sampler.sample(rng);
        state.rgs_step(j2);
        t += 1;
    }
    (state.into_z(), t)
}

/// Approximates `(A₁ᵀA₁)⁻¹ b̂` by alternating RK/RGS steps until
/// `‖A₁ᵀA₁ z − b̂‖ <= inner_tol·‖b̂‖` (checked every `check_every` steps)
/// or `max_inner` steps. Returns `z` and the number of steps taken.
pub fn inner_rk_rgs(
    a1: &DenseMatrix,
    bhat: &[f64],
    cfg: &SolverConfig,
    rng: &mut RngState,
) -> Result<(Vec<f64>, usize)> {
    if bhat.len() != a1.cols() {
        return Err(IlsError::Dimension("b̂ must have length n".into()));
    }
    let cols = A1Columns::new(a1)?;
    let sampler = cols.sampler();
    Ok(run_inner(&cols, &sampler, bhat, cfg, rng))
}

pub fn sp_rk_rgs_solve(prob: &IlsProblem, cfg: &SolverConfig) -> Result<SolveReport> {
    let mut rng = RngState::new(cfg.seed);
    sp_rk_rgs_solve_with_rng(prob, cfg, &mut rng)
}

pub fn sp_rk_rgs_solve_with_rng(
    prob: &IlsProblem,
    cfg: &SolverConfig,
    rng: &mut RngState,
) -> Result<SolveReport> {
    cfg.validate(prob.n())?;
    let started = Instant::now();
    let cols = A1Columns::new(prob.a1())?;
    let sampler = cols.sampler();
    let a2bar = prob.a2().gram();
    let bbar = prob.at_j_b();

    drive(prob, cfg, started, |x| {
        let mut bhat = a2bar.matvec(x);
        for (b, c) in bhat.iter_mut().zip(&bbar) {
            *b += c;
        }
        let inner_start = Instant::now();
        let (z, t) = run_inner(&cols, &sampler, &bhat, cfg, rng);
        Ok(OuterStep {
            x: z,
            inner_iters: Some(t),
            inner_time: inner_start.elapsed(),
        })
    })
}
