//! Jacobi-preconditioned conjugate gradients.

use super::{SparseError, SparseOperator};

/// Solve A x = b for symmetric positive definite A.
///
/// Terminates when ‖Ax − b‖ ≤ tol·‖b‖; the iteration cap is 50·√n.  On
/// failure the error carries the last relative residual, which is how the
/// callers distinguish "singular system" from "tolerance too tight".
pub fn solve_spd(a: &SparseOperator, b: &[f64], tol: f64) -> Result<Vec<f64>, SparseError> {
    let n = a.dimension();
    if b.len() != n {
        return Err(SparseError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    // Jacobi preconditioner; |d| guards assembled diagonals that are tiny
    // or (for indefinite misuse) negative — CG itself still requires SPD.
    let inv_diag: Vec<f64> = a
        .diag()
        .iter()
        .map(|&d| if d.abs() > 1e-300 { 1.0 / d.abs() } else { 1.0 })
        .collect();

    let cap = 50 * (n as f64).sqrt().ceil() as usize;
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    let mut residual = 1.0;
    for _ in 0..cap {
        a.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            // Direction of nonpositive curvature: not SPD (or roundoff on a
            // singular system); report as non-convergence with the residual.
            return Err(SparseError::NoConvergence {
                iterations: cap,
                tol,
                residual,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        residual = norm(&r) / b_norm;
        if residual <= tol {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SparseError::NoConvergence {
        iterations: cap,
        tol,
        residual,
    })
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}
