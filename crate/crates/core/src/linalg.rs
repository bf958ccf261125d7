//! Dense factorizations: Cholesky, Householder QR, and an inverse-iteration
//! estimate of the smallest eigenvalue of an SPD matrix.

use crate::matrix::{dot, norm2, DenseMatrix};
use crate::sampling::RngState;

/// A pivot `<= 0` met during Cholesky. Callers map it to the error that
/// fits their context (rank deficiency vs. ill-posedness).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CholeskyBreakdown {
    pub index: usize,
    pub pivot: f64,
}

/// Lower-triangular factor `L` with `G = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: DenseMatrix,
}

impl Cholesky {
    /// Pivot-free factorization of a symmetric matrix; only the lower
    /// triangle of `g` is read.
    pub fn factor(g: &DenseMatrix) -> Result<Self, CholeskyBreakdown> {
        assert!(g.is_square(), "Cholesky needs a square matrix");
        let n = g.rows();
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let lj = &l.row(j)[..j];
            let pivot = g.get(j, j) - dot(lj, lj);
            if !pivot.is_finite() || pivot <= 0.0 {
                return Err(CholeskyBreakdown { index: j, pivot });
            }
            let d = pivot.sqrt();
            l.set(j, j, d);
            for i in (j + 1)..n {
                let s = g.get(i, j) - dot(&l.row(i)[..j], &l.row(j)[..j]);
                l.set(i, j, s / d);
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn factor_l(&self) -> &DenseMatrix {
        &self.l
    }

    /// Solves `L y = b` in place.
    pub fn forward_in_place(&self, b: &mut [f64]) {
        for i in 0..self.dim() {
            let row = self.l.row(i);
            let s = b[i] - dot(&row[..i], &b[..i]);
            b[i] = s / row[i];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward_in_place(&self, y: &mut [f64]) {
        let n = self.dim();
        for i in (0..n).rev() {
            y[i] /= self.l.get(i, i);
            let xi = y[i];
            // Column i of Lᵀ above the diagonal is row i of L left of it.
            for (yk, &lik) in y[..i].iter_mut().zip(&self.l.row(i)[..i]) {
                *yk -= lik * xi;
            }
        }
    }

    /// Solves `G x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        self.forward_in_place(b);
        self.backward_in_place(b);
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// `Lᵀ v`, so that `vᵀ G v = ‖Lᵀ v‖²`.
    pub fn lt_mul(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for i in 0..n {
            for (o, &lij) in out[..=i].iter_mut().zip(self.l.row(i)) {
                *o += lij * v[i];
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.l.diagonal()
    }
}

/// Thin Householder QR, `A = Q R` with `Q` m×n orthonormal columns and `R`
/// n×n upper triangular. Requires `m >= n`.
#[derive(Debug, Clone)]
pub struct HouseholderQr {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

impl HouseholderQr {
    pub fn factor(a: &DenseMatrix) -> Self {
        let (m, n) = (a.rows(), a.cols());
        assert!(m >= n, "thin QR needs rows >= cols");
        let mut work = a.clone();
        let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);

        for k in 0..n {
            let mut v: Vec<f64> = (k..m).map(|i| work.get(i, k)).collect();
            let alpha = norm2(&v);
            if alpha == 0.0 {
                reflectors.push(vec![0.0; m - k]);
                continue;
            }
            let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
            v[0] += sign * alpha;
            let vnorm = norm2(&v);
            for vi in &mut v {
                *vi /= vnorm;
            }
            // work[k.., k..] -= 2 v (vᵀ work[k.., k..])
            for j in k..n {
                let s: f64 = (k..m).map(|i| v[i - k] * work.get(i, j)).sum();
                for i in k..m {
                    let updated = work.get(i, j) - 2.0 * v[i - k] * s;
                    work.set(i, j, updated);
                }
            }
            reflectors.push(v);
        }

        let r = DenseMatrix::from_fn(n, n, |i, j| if j >= i { work.get(i, j) } else { 0.0 });

        // Q = H_0 H_1 ... H_{n-1} [I_n; 0], applied right to left.
        let mut q = DenseMatrix::from_fn(m, n, |i, j| if i == j { 1.0 } else { 0.0 });
        for k in (0..n).rev() {
            let v = &reflectors[k];
            for j in 0..n {
                let s: f64 = (k..m).map(|i| v[i - k] * q.get(i, j)).sum();
                if s == 0.0 {
                    continue;
                }
                for i in k..m {
                    let updated = q.get(i, j) - 2.0 * v[i - k] * s;
                    q.set(i, j, updated);
                }
            }
        }
        Self { q, r }
    }

    /// Solves `R x = y` by back substitution.
    pub fn solve_r(&self, y: &[f64]) -> Vec<f64> {
        let n = self.r.rows();
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            let s = x[i] - dot(&self.r.row(i)[i + 1..], &x[i + 1..]);
            x[i] = s / self.r.get(i, i);
        }
        x
    }
}

/// Smallest eigenvalue of an SPD matrix `g` given its Cholesky factor, by
/// inverse iteration with a Rayleigh-quotient readout. The returned value is
/// an upper bound on `λ_min` that tightens quadratically.
pub fn smallest_eigenvalue_spd(
    g: &DenseMatrix,
    chol: &Cholesky,
    max_iters: usize,
    rng: &mut RngState,
) -> f64 {
    let n = g.rows();
    let mut v: Vec<f64> = (0..n).map(|_| rng.uniform() - 0.5).collect();
    normalize(&mut v);
    let mut estimate = f64::INFINITY;
    for _ in 0..max_iters {
        chol.solve_in_place(&mut v);
        if !normalize(&mut v) {
            break;
        }
        let rq = dot(&v, &g.matvec(&v));
        let converged = (estimate - rq).abs() <= 1e-14 * rq.abs();
        estimate = rq;
        if converged {
            break;
        }
    }
    estimate
}

fn normalize(v: &mut [f64]) -> bool {
    let nrm = norm2(v);
    if nrm == 0.0 || !nrm.is_finite() {
        return false;
    }
    for x in v.iter_mut() {
        *x /= nrm;
    }
    true
}
