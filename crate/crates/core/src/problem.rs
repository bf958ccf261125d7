//! The partitioned ILS problem `min (b − Ax)ᵀ J (b − Ax)` with
//! `A = [A₁; A₂]`, `b = [b₁; b₂]` and `J = diag(I_p, −I_q)`.
//!
//! `J` is never stored; only its action is implemented.

use crate::error::{IlsError, Result};
use crate::linalg::Cholesky;
use crate::matrix::{dot, norm2_sq, DenseMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct IlsProblem {
    a1: DenseMatrix,
    a2: DenseMatrix,
    b1: Vec<f64>,
    b2: Vec<f64>,
}

impl IlsProblem {
    /// Checks shapes: `p >= 1`, `n >= 1`, `p + q >= n`, matching column
    /// counts and right-hand-side lengths. Well-posedness is not checked
    /// here; see [`check_spd`].
    pub fn new(a1: DenseMatrix, a2: DenseMatrix, b1: Vec<f64>, b2: Vec<f64>) -> Result<Self> {
        let (p, n) = (a1.rows(), a1.cols());
        let q = a2.rows();
        if p == 0 || n == 0 {
            return Err(IlsError::Dimension(format!(
                "A1 must be nonempty, got {p}x{n}"
            )));
        }
        if a2.cols() != n {
            return Err(IlsError::Dimension(format!(
                "A2 has {} columns, A1 has {n}",
                a2.cols()
            )));
        }
        if b1.len() != p || b2.len() != q {
            return Err(IlsError::Dimension(format!(
                "b1/b2 lengths {}/{} do not match p={p}, q={q}",
                b1.len(),
                b2.len()
            )));
        }
        if p + q < n {
            return Err(IlsError::Dimension(format!("m = {} < n = {n}", p + q)));
        }
        if let Some(index) = b1.iter().chain(&b2).position(|v| !v.is_finite()) {
            return Err(IlsError::NonFinite { index });
        }
        Ok(Self { a1, a2, b1, b2 })
    }

    /// Splits a stacked `A` (m×n) and `b` after row `p`.
    pub fn from_stacked(a: &DenseMatrix, b: &[f64], p: usize) -> Result<Self> {
        if b.len() != a.rows() || p > a.rows() {
            return Err(IlsError::Dimension(format!(
                "stacked A is {}x{}, b has length {}, p = {p}",
                a.rows(),
                a.cols(),
                b.len()
            )));
        }
        let n = a.cols();
        let a1 = DenseMatrix::new(p, n, a.data()[..p * n].to_vec())?;
        let a2 = DenseMatrix::new(a.rows() - p, n, a.data()[p * n..].to_vec())?;
        Self::new(a1, a2, b[..p].to_vec(), b[p..].to_vec())
    }

    pub fn a1(&self) -> &DenseMatrix {
        &self.a1
    }
    pub fn a2(&self) -> &DenseMatrix {
        &self.a2
    }
    pub fn b1(&self) -> &[f64] {
        &self.b1
    }
    pub fn b2(&self) -> &[f64] {
        &self.b2
    }
    pub fn p(&self) -> usize {
        self.a1.rows()
    }
    pub fn q(&self) -> usize {
        self.a2.rows()
    }
    pub fn n(&self) -> usize {
        self.a1.cols()
    }
    pub fn m(&self) -> usize {
        self.p() + self.q()
    }

    /// `AᵀJb = A₁ᵀb₁ − A₂ᵀb₂`.
    pub fn at_j_b(&self) -> Vec<f64> {
        let mut v = self.a1.tr_matvec(&self.b1);
        for (vi, wi) in v.iter_mut().zip(self.a2.tr_matvec(&self.b2)) {
            *vi -= wi;
        }
        v
    }

    /// `AᵀJ(Ax − b) = A₁ᵀ(A₁x − b₁) − A₂ᵀ(A₂x − b₂)`.
    pub fn normal_residual(&self, x: &[f64]) -> Vec<f64> {
        let r1: Vec<f64> = self
            .a1
            .matvec(x)
            .into_iter()
            .zip(&self.b1)
            .map(|(a, b)| a - b)
            .collect();
        let r2: Vec<f64> = self
            .a2
            .matvec(x)
            .into_iter()
            .zip(&self.b2)
            .map(|(a, b)| a - b)
            .collect();
        let mut g = self.a1.tr_matvec(&r1);
        for (gi, hi) in g.iter_mut().zip(self.a2.tr_matvec(&r2)) {
            *gi -= hi;
        }
        g
    }

    /// Stacked `A = [A₁; A₂]`.
    pub fn stacked_a(&self) -> DenseMatrix {
        self.a1.vstack(&self.a2).expect("column counts agree")
    }

    /// Stacked `b = [b₁; b₂]`.
    pub fn stacked_b(&self) -> Vec<f64> {
        let mut b = self.b1.clone();
        b.extend_from_slice(&self.b2);
        b
    }
}

/// `J v`: keeps the first `p` entries, negates the last `q`.
pub fn apply_signature(p: usize, q: usize, v: &[f64]) -> Result<Vec<f64>> {
    if p == 0 {
        return Err(IlsError::Dimension("signature needs p >= 1".into()));
    }
    if v.len() != p + q {
        return Err(IlsError::Dimension(format!(
            "vector length {} does not match p + q = {}",
            v.len(),
            p + q
        )));
    }
    Ok(v.iter()
        .enumerate()
        .map(|(i, &x)| if i < p { x } else { -x })
        .collect())
}

/// `M = AᵀJA = A₁ᵀA₁ − A₂ᵀA₂`, exactly symmetric.
pub fn normal_matrix(prob: &IlsProblem) -> DenseMatrix {
    let mut m = prob
        .a1
        .gram()
        .sub(&prob.a2.gram())
        .expect("A1 and A2 share the column count");
    m.symmetrize();
    m
}

/// Relative Frobenius asymmetry accepted by [`check_spd`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// True iff a pivot-free Cholesky factorization of `m` succeeds.
pub fn check_spd(m: &DenseMatrix) -> Result<bool> {
    if !m.is_square() {
        return Err(IlsError::Shape(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut asym = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = m.get(i, j) - m.get(j, i);
            asym += 2.0 * d * d;
        }
    }
    let scale = m.frobenius_norm();
    if asym.sqrt() > SYMMETRY_TOL * scale {
        return Err(IlsError::Shape(format!(
            "matrix is asymmetric: ‖M − Mᵀ‖_F = {:e}",
            asym.sqrt()
        )));
    }
    Ok(Cholesky::factor(m).is_ok())
}

/// `RR = ‖AᵀJ(Ax − b)‖² / ‖AᵀJb‖²`.
pub fn relative_residual(prob: &IlsProblem, x: &[f64]) -> Result<f64> {
    ResidualEvaluator::new(prob)?.evaluate(x)
}

/// Caches `‖AᵀJb‖²` so the relative residual can be evaluated every outer
/// iteration without recomputing the denominator.
#[derive(Debug, Clone)]
pub struct ResidualEvaluator<'a> {
    prob: &'a IlsProblem,
    rhs_norm_sq: f64,
}

impl<'a> ResidualEvaluator<'a> {
    pub fn new(prob: &'a IlsProblem) -> Result<Self> {
        let rhs_norm_sq = norm2_sq(&prob.at_j_b());
        if rhs_norm_sq == 0.0 {
            return Err(IlsError::DegenerateRhs);
        }
        Ok(Self { prob, rhs_norm_sq })
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.prob.n() {
            return Err(IlsError::Dimension(format!(
                "iterate has length {}, expected n = {}",
                x.len(),
                self.prob.n()
            )));
        }
        let g = self.prob.normal_residual(x);
        Ok(dot(&g, &g) / self.rhs_norm_sq)
    }
}
