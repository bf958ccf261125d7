//! Independent oracles shared by the integration tests. Everything here goes
//! through nalgebra rather than the crate's own factorizations.

#![allow(dead_code)]

use ils_core::{generate, DenseMatrix, GenSpec, IlsProblem, RngState};
use nalgebra::{DMatrix, DVector};

pub fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

pub fn to_vec(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

/// `(A₁ᵀA₁ − A₂ᵀA₂)⁻¹ (A₁ᵀb₁ − A₂ᵀb₂)` by LU.
pub fn oracle_solution(prob: &IlsProblem) -> Vec<f64> {
    let a1 = to_na(prob.a1());
    let a2 = to_na(prob.a2());
    let m = a1.transpose() * &a1 - a2.transpose() * &a2;
    let rhs = a1.transpose() * DVector::from_column_slice(prob.b1())
        - a2.transpose() * DVector::from_column_slice(prob.b2());
    to_vec(
        &m.lu()
            .solve(&rhs)
            .expect("oracle normal matrix is singular"),
    )
}

/// Eigenvalues of the symmetric part of `m`, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let s = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// `ρ((A₁ᵀA₁)⁻¹ A₂ᵀA₂)` from the congruent symmetric matrix `L⁻¹ A₂ᵀA₂ L⁻ᵀ`.
pub fn oracle_spectral_radius(prob: &IlsProblem) -> f64 {
    let a1 = to_na(prob.a1());
    let a2 = to_na(prob.a2());
    let g1 = a1.transpose() * &a1;
    let g2 = a2.transpose() * &a2;
    let l = g1.cholesky().expect("A1 must have full column rank").l();
    let x = l.solve_lower_triangular(&g2).unwrap();
    let s = l.solve_lower_triangular(&x.transpose()).unwrap();
    sym_eigenvalues(&s)
        .into_iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Seeded instance with `2 ≤ n ≤ 30`, `n ≤ p ≤ 3n`, `0 ≤ q ≤ n` and
/// `target_rho ∈ [0.05, 0.5]`. Returns the problem and its spec.
pub fn random_instance(seed: u64) -> (IlsProblem, GenSpec) {
    let mut attempt = 0u64;
    loop {
        let mut rng = RngState::stream(seed, 1_000 + attempt);
        let n = 2 + rng.below(29);
        let p = n + rng.below(2 * n + 1);
        let q = rng.below(n + 1);
        let target_rho = 0.05 + 0.45 * rng.uniform();
        let spec = GenSpec {
            p,
            q,
            n,
            nu: 1.0,
            seed: seed * 7919 + attempt,
            target_rho: Some(target_rho),
        };
        match generate(&spec) {
            Ok(prob) => return (prob, spec),
            Err(_) => attempt += 1,
        }
    }
}

/// Dense `p×n` matrix with i.i.d. uniform entries.
pub fn uniform_matrix(p: usize, n: usize, rng: &mut RngState) -> DenseMatrix {
    DenseMatrix::from_fn(p, n, |_, _| rng.uniform())
}

pub fn uniform_vec(k: usize, rng: &mut RngState) -> Vec<f64> {
    (0..k).map(|_| rng.uniform()).collect()
}
