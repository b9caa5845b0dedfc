//! Small dense solves shared by the coefficient systems.

use nalgebra::{DMatrix, DVector};

/// Outcome of a dense solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemReport {
    /// One-norm condition number estimate ‖A‖₁‖A⁻¹‖₁.
    pub condition: f64,
    /// ‖Ax − b‖∞ / ‖b‖∞ after the solve.
    pub residual: f64,
}

fn norm1(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `a x = b` by LU with partial pivoting after scaling rows to unit
/// max-norm. Returns `None` when the matrix is numerically singular.
pub fn dense_solve(mut a: DMatrix<f64>, mut b: DVector<f64>) -> Option<(DVector<f64>, SystemReport)> {
    let (a0, b0) = (a.clone(), b.clone());
    for i in 0..a.nrows() {
        let s = a.row(i).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if s > 0.0 {
            a.row_mut(i).scale_mut(1.0 / s);
            b[i] /= s;
        }
    }
    let inv = a.clone().try_inverse()?;
    let condition = norm1(&a) * norm1(&inv);
    if !condition.is_finite() || condition > 1e15 {
        return None;
    }
    let x = a.lu().solve(&b)?;
    let r = &a0 * &x - &b0;
    let bn = b0.amax().max(f64::MIN_POSITIVE);
    Some((x, SystemReport { condition, residual: r.amax() / bn }))
}
