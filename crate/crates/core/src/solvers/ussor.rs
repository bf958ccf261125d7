//! Two-parameter USSOR baseline. Parameters `(ω, ω̂)` are supplied by the
//! caller; convergence depends on them and is not guaranteed.

use std::time::Instant;

use crate::error::{IlsError, Result};
use crate::linalg::Cholesky;
use crate::matrix::DenseMatrix;
use crate::problem::IlsProblem;

use super::{drive, OuterStep, SolveReport, SolverConfig};

/// `τ = ω + ω̂ − ωω̂`.
pub fn ussor_tau(omega: f64, omega_hat: f64) -> f64 {
    omega + omega_hat - omega * omega_hat
}

#[derive(Debug, Clone)]
pub struct UssorState {
    chol_a1: Cholesky,
    r_mat: DenseMatrix,
    b1bar: Vec<f64>,
    tau: f64,
    omega: f64,
    omega_hat: f64,
    delta1bar: Vec<f64>,
    delta2: Vec<f64>,
}

impl UssorState {
    /// Precomputes `b̄₁ = A₁ᵀb₁`, `R = A₂ᵀA₂`, the factor of `A₁ᵀA₁`, and
    /// initializes `δ̄₁⁰ = A₁ᵀ(b₁ − A₁x⁰)`, `δ₂⁰ = b₂ − A₂x⁰`.
    pub fn new(prob: &IlsProblem, omega: f64, omega_hat: f64, x0: &[f64]) -> Result<Self> {
        if !omega.is_finite() || !omega_hat.is_finite() {
            return Err(IlsError::Parameter(
                "USSOR parameters must be finite".into(),
            ));
        }
        let chol_a1 = Cholesky::factor(&prob.a1().gram()).map_err(|e| IlsError::RankDeficient {
            index: e.index,
            pivot: e.pivot,
        })?;
        let r_mat = prob.a2().gram();
        let b1bar = prob.a1().tr_matvec(prob.b1());
        let tau = ussor_tau(omega, omega_hat);
        let r1: Vec<f64> = prob
            .b1()
            .iter()
            .zip(prob.a1().matvec(x0))
            .map(|(b, ax)| b - ax)
            .collect();
        let delta1bar = prob.a1().tr_matvec(&r1);
        let delta2 = prob
            .b2()
            .iter()
            .zip(prob.a2().matvec(x0))
            .map(|(b, ax)| b - ax)
            .collect();
        Ok(Self {
            chol_a1,
            r_mat,
            b1bar,
            tau,
            omega,
            omega_hat,
            delta1bar,
            delta2,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega_hat(&self) -> f64 {
        self.omega_hat
    }

    pub fn delta1bar(&self) -> &[f64] {
        &self.delta1bar
    }

    pub fn delta2(&self) -> &[f64] {
        &self.delta2
    }

    /// Overrides the auxiliary vectors, e.g. to start at a consistent point.
    pub fn set_deltas(&mut self, delta1bar: Vec<f64>, delta2: Vec<f64>) -> Result<()> {
        if delta1bar.len() != self.delta1bar.len() || delta2.len() != self.delta2.len() {
            return Err(IlsError::Dimension("USSOR auxiliary vector lengths".into()));
        }
        self.delta1bar = delta1bar;
        self.delta2 = delta2;
        Ok(())
    }

    /// One sweep:
    ///
    /// ```text
    /// δ̄₁⁺ = τA₂ᵀ[(1−ω)δ₂ + ωb₂] + ωτ R P(δ̄₁ − b̄₁) + (1−τ)δ̄₁
    /// x⁺  = (1−τ)x + P[τb̄₁ − ω(1−ω̂)δ̄₁ − ω̂δ̄₁⁺]
    /// δ₂⁺ = (1−τ)(A₂x + δ₂) − A₂x⁺ + τb₂
    /// ```
    ///
    /// with `P = (A₁ᵀA₁)⁻¹` applied through the Cholesky factor.
    pub fn step(&mut self, prob: &IlsProblem, x: &[f64]) -> Vec<f64> {
        let (tau, omega, omega_hat) = (self.tau, self.omega, self.omega_hat);
        let a2 = prob.a2();
        let b2 = prob.b2();

        let mix: Vec<f64> = self
            .delta2
            .iter()
            .zip(b2)
            .map(|(d, b)| tau * ((1.0 - omega) * d + omega * b))
            .collect();
        let term1 = a2.tr_matvec(&mix);
        let mut shifted: Vec<f64> = self
            .delta1bar
            .iter()
            .zip(&self.b1bar)
            .map(|(d, b)| d - b)
            .collect();
        self.chol_a1.solve_in_place(&mut shifted);
        let term2 = self.r_mat.matvec(&shifted);
        let delta1_next: Vec<f64> = (0..x.len())
            .map(|i| term1[i] + omega * tau * term2[i] + (1.0 - tau) * self.delta1bar[i])
            .collect();

        let mut rhs: Vec<f64> = (0..x.len())
            .map(|i| {
                tau * self.b1bar[i]
                    - omega * (1.0 - omega_hat) * self.delta1bar[i]
                    - omega_hat * delta1_next[i]
            })
            .collect();
        self.chol_a1.solve_in_place(&mut rhs);
        let x_next: Vec<f64> = x
            .iter()
            .zip(&rhs)
            .map(|(xi, pi)| (1.0 - tau) * xi + pi)
            .collect();

        let a2x = a2.matvec(x);
        let a2x_next = a2.matvec(&x_next);
        let delta2_next: Vec<f64> = (0..b2.len())
            .map(|i| (1.0 - tau) * (a2x[i] + self.delta2[i]) - a2x_next[i] + tau * b2[i])
            .collect();

        self.delta1bar = delta1_next;
        self.delta2 = delta2_next;
        x_next
    }
}

pub fn ussor_solve(
    prob: &IlsProblem,
    omega: f64,
    omega_hat: f64,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate(prob.n())?;
    let started = Instant::now();
    let x0 = cfg.x0.clone().unwrap_or_else(|| vec![0.0; prob.n()]);
    let mut state = UssorState::new(prob, omega, omega_hat, &x0)?;
    drive(prob, cfg, started, |x| {
        Ok(OuterStep::plain(state.step(prob, x)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::dist2;

    fn example() -> IlsProblem {
        IlsProblem::new(
            DenseMatrix::diag(&[2.0, 1.0]),
            DenseMatrix::from_rows(&[[1.0, 0.0]]).unwrap(),
            vec![2.0, 1.0],
            vec![1.0],
        )
        .unwrap()
    }

    #[test]
    fn tau_examples() {
        assert!((ussor_tau(0.5, 1.0917) - 1.04585).abs() < 1e-12);
        assert!((ussor_tau(0.5, 1.0917) - 1.0458).abs() < 1e-4);
        assert_eq!(ussor_tau(1.0, 1.0), 1.0);
        assert_eq!(ussor_tau(0.0, 0.0), 0.0);
    }

    #[test]
    fn state_tau_is_bit_identical() {
        let s = UssorState::new(&example(), 0.37, 1.21, &[0.0, 0.0]).unwrap();
        assert_eq!(s.tau().to_bits(), ussor_tau(0.37, 1.21).to_bits());
    }

    #[test]
    fn unit_parameters_converge_on_example() {
        let r = ussor_solve(&example(), 1.0, 1.0, &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!(dist2(&r.x, &[1.0, 1.0]) < 1e-3);
    }

    #[test]
    fn consistent_start_is_a_fixed_point() {
        let prob = example();
        let xs = [1.0, 1.0];
        let mut s = UssorState::new(&prob, 0.5, 1.0917, &xs).unwrap();
        // δ̄₁ = A₁ᵀ(b₁ − A₁x*) = 0 and δ₂ = b₂ − A₂x* = 0 here.
        assert_eq!(s.delta1bar(), &[0.0, 0.0]);
        assert_eq!(s.delta2(), &[0.0]);
        let x1 = s.step(&prob, &xs);
        assert!(dist2(&x1, &xs) < 1e-10);
    }

    #[test]
    fn bad_parameters_report_divergence() {
        let r = ussor_solve(&example(), 3.0, 3.0, &SolverConfig::default()).unwrap();
        assert!(!r.converged);
        assert!(r.diverged);
        assert!(r.outer_iters < 20_000);
    }
}
