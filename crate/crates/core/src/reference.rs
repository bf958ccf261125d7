//! Direct solvers used as ground truth.

use crate::error::{IlsError, Result};
use crate::linalg::{Cholesky, HouseholderQr};
use crate::matrix::DenseMatrix;
use crate::problem::{normal_matrix, IlsProblem};

/// Relative size below which a diagonal entry of `R` counts as zero.
const RANK_TOL: f64 = 1e-12;

/// Solves `(A₁ᵀA₁ − A₂ᵀA₂) x = AᵀJb` by Cholesky.
pub fn solve_normal_direct(prob: &IlsProblem) -> Result<Vec<f64>> {
    let m = normal_matrix(prob);
    let chol = Cholesky::factor(&m).map_err(|e| IlsError::NotWellPosed {
        index: e.index,
        pivot: e.pivot,
    })?;
    Ok(chol.solve(&prob.at_j_b()))
}

/// QR–Cholesky: `A = QR`, solve `(QᵀJQ) y = QᵀJb` by Cholesky, `x = R⁻¹y`.
/// `QᵀJQ` is SPD exactly when the problem is well posed.
pub fn solve_qr_cholesky(prob: &IlsProblem) -> Result<Vec<f64>> {
    let qr = HouseholderQr::factor(&prob.stacked_a());
    let n = prob.n();
    let p = prob.p();

    let r_diag = qr.r.diagonal();
    let scale = r_diag.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if let Some((index, &pivot)) = r_diag
        .iter()
        .enumerate()
        .find(|(_, v)| v.abs() <= RANK_TOL * scale || scale == 0.0)
    {
        return Err(IlsError::RankDeficient { index, pivot });
    }

    let q1 = DenseMatrix::new(p, n, qr.q.data()[..p * n].to_vec())?;
    let q2 = DenseMatrix::new(prob.q(), n, qr.q.data()[p * n..].to_vec())?;
    let mut qjq = q1.gram().sub(&q2.gram())?;
    qjq.symmetrize();
    let mut y = q1.tr_matvec(prob.b1());
    for (yi, zi) in y.iter_mut().zip(q2.tr_matvec(prob.b2())) {
        *yi -= zi;
    }
    let chol = Cholesky::factor(&qjq).map_err(|e| IlsError::NotWellPosed {
        index: e.index,
        pivot: e.pivot,
    })?;
    chol.solve_in_place(&mut y);
    Ok(qr.solve_r(&y))
}
