use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Frames whose 1-norm condition estimate exceeds this are refused.
pub const MAX_CONDITION: f64 = 1e8;

pub fn norm_1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse by partial-pivot LU, with the condition number `‖A‖₁ ‖A⁻¹‖₁`.
pub fn invert_with_condition(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let inv = m.clone().lu().try_inverse().ok_or(Error::NearSingular {
        condition: f64::INFINITY,
    })?;
    let condition = norm_1(m) * norm_1(&inv);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::NearSingular { condition });
    }
    Ok((inv, condition))
}

/// Least-squares solution of `X β ≈ b`.
pub fn least_squares(x: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    x.clone()
        .svd(true, true)
        .solve(b, 1e-14)
        .map_err(|e| Error::InvalidParameter(format!("least squares failed: {e}")))
}
