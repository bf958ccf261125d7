//! Synthetic problem families: dense uniform `A₁`, scaled identity `A₂`.
//!
//! At large `p` the literal scale `ν = 7` keeps `A₁ᵀA₁ − ν²A₂ᵀA₂` positive
//! definite, but at desk scale it usually does not. [`GenSpec::target_rho`]
//! instead picks `ν` from the smallest eigenvalue of `A₁ᵀA₁` so that the
//! splitting iteration sees a chosen contraction factor.

use serde::{Deserialize, Serialize};

use crate::error::{IlsError, Result};
use crate::linalg::{smallest_eigenvalue_spd, Cholesky};
use crate::matrix::DenseMatrix;
use crate::problem::{check_spd, normal_matrix, IlsProblem};
use crate::sampling::RngState;

const EIGEN_ITERS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    /// Multiplier of the identity block in `A₂`.
    pub nu: f64,
    pub seed: u64,
    /// When set, overrides `nu` with `√(target_rho · λ_min(A₁ᵀA₁))`.
    pub target_rho: Option<f64>,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            p: 1000,
            q: 100,
            n: 100,
            nu: 7.0,
            seed: 0,
            target_rho: None,
        }
    }
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p < self.n {
            return Err(IlsError::Parameter(format!(
                "generator needs p >= n >= 1, got p={}, n={}",
                self.p, self.n
            )));
        }
        match self.target_rho {
            Some(rho) if !(rho > 0.0 && rho < 1.0) => Err(IlsError::Parameter(format!(
                "target_rho must lie in (0, 1), got {rho}"
            ))),
            None if !(self.nu > 0.0 && self.nu.is_finite()) => Err(IlsError::Parameter(format!(
                "nu must be positive, got {}",
                self.nu
            ))),
            _ => Ok(()),
        }
    }

    pub fn m(&self) -> usize {
        self.p + self.q
    }
}

/// `A₁ = rand(p, n)`, `A₂ = ν·eye(q, n)`, `b₁ = rand(p)`, `b₂ = rand(q)`,
/// drawn in that order (matrices row-major).
pub fn gen_random_ils(spec: &GenSpec, rng: &mut RngState) -> Result<IlsProblem> {
    spec.validate()?;
    let GenSpec { p, q, n, .. } = *spec;
    let a1 = DenseMatrix::from_fn(p, n, |_, _| rng.uniform());
    let b1: Vec<f64> = (0..p).map(|_| rng.uniform()).collect();
    let b2: Vec<f64> = (0..q).map(|_| rng.uniform()).collect();

    let nu = match spec.target_rho {
        Some(rho) => {
            let g = a1.gram();
            let chol = Cholesky::factor(&g).map_err(|e| {
                IlsError::Generation(format!(
                    "A1 is numerically rank deficient (column {})",
                    e.index
                ))
            })?;
            let lambda_min = smallest_eigenvalue_spd(&g, &chol, EIGEN_ITERS, rng);
            (rho * lambda_min).sqrt()
        }
        None => spec.nu,
    };
    let a2 = DenseMatrix::from_fn(q, n, |i, j| if i == j { nu } else { 0.0 });

    let prob = IlsProblem::new(a1, a2, b1, b2)?;
    if !check_spd(&normal_matrix(&prob))? {
        return Err(IlsError::Generation(format!(
            "A1ᵀA1 − A2ᵀA2 is not positive definite for p={p}, q={q}, n={n}, nu={nu}; lower nu or raise p"
        )));
    }
    Ok(prob)
}

/// Minkowski-space family: `q = 1`, `A₂ = ν·[1, 0, …, 0]`.
pub fn gen_minkowski_ils(p: usize, n: usize, nu: f64, rng: &mut RngState) -> Result<IlsProblem> {
    let spec = GenSpec {
        p,
        q: 1,
        n,
        nu,
        seed: rng.seed(),
        target_rho: None,
    };
    gen_random_ils(&spec, rng)
}

/// Generates from `spec.seed` alone.
pub fn generate(spec: &GenSpec) -> Result<IlsProblem> {
    gen_random_ils(spec, &mut RngState::new(spec.seed))
}
