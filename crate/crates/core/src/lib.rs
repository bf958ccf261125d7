//! Solvers for the indefinite least squares problem
//!
//! ```text
//! min_x (b − Ax)ᵀ J (b − Ax),   J = diag(I_p, −I_q),
//! ```
//!
//! which has a unique solution exactly when `A₁ᵀA₁ − A₂ᵀA₂` is positive
//! definite. The crate provides the parameter-free splitting iteration
//! ([`sp_solve`]), two randomized variants that replace its inner linear
//! solve by Kaczmarz/Gauss–Seidel sweeps ([`sp_rk_rgs_solve`]) or sampled
//! coordinate descent ([`sp_scd_solve`]), a two-parameter USSOR baseline,
//! direct reference solvers, problem generators and a benchmark harness.
//!
//! ```
//! use ils_core::{sp_solve, DenseMatrix, IlsProblem, SolverConfig};
//!
//! let prob = IlsProblem::new(
//!     DenseMatrix::diag(&[2.0, 1.0]),
//!     DenseMatrix::from_rows(&[[1.0, 0.0]]).unwrap(),
//!     vec![2.0, 1.0],
//!     vec![1.0],
//! )
//! .unwrap();
//! let report = sp_solve(&prob, &SolverConfig::default()).unwrap();
//! assert!(report.converged);
//! assert!((report.x[0] - 1.0).abs() < 1e-3);
//! ```

pub mod error;
pub mod generators;
pub mod harness;
pub mod linalg;
pub mod matrix;
pub mod mm;
pub mod problem;
pub mod reference;
pub mod sampling;
pub mod solvers;

pub use error::{IlsError, Result};
pub use generators::{gen_minkowski_ils, gen_random_ils, generate, GenSpec};
pub use harness::{
    export_csv, flop_estimate, import_csv, run_experiment, run_trials, speedup, ExperimentSpec,
    Method, ProblemSource, ResultRow,
};
pub use matrix::DenseMatrix;
pub use problem::{apply_signature, check_spd, normal_matrix, relative_residual, IlsProblem};
pub use reference::{solve_normal_direct, solve_qr_cholesky};
pub use sampling::{AlphaPolicy, RngState};
pub use solvers::rk_rgs::{sp_rk_rgs_solve, sp_rk_rgs_solve_with_rng};
pub use solvers::scd::{sp_scd_solve, sp_scd_solve_with_rng};
pub use solvers::sp::{sp_precompute, sp_solve, sp_spectral_radius, SpState};
pub use solvers::ussor::{ussor_solve, ussor_tau};
pub use solvers::{SolveReport, SolverConfig};
