//! Ordinary least squares on lagged panels, for empirical prediction-error
//! variances.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Residual sum of squares of `target` regressed on `regressors` plus an intercept.
pub(crate) fn residual_sum_squares(target: &[f64], regressors: &[Vec<f64>]) -> Result<f64> {
    let t = target.len();
    let p = regressors.len() + 1;
    if t <= p {
        return Err(Error::InsufficientData(format!(
            "{t} observations for {p} coefficients"
        )));
    }
    let x = DMatrix::from_fn(t, p, |r, c| if c == 0 { 1.0 } else { regressors[c - 1][r] });
    let y = DVector::from_column_slice(target);
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * &y;
    let chol = xtx
        .cholesky()
        .ok_or_else(|| Error::SingularCovariance("collinear regressors".into()))?;
    let beta = chol.solve(&xty);
    let resid = y - x * beta;
    Ok(resid.norm_squared())
}

/// Column of `series` shifted by `shift` (positive = past), aligned to rows
/// `start..end` of the original index.
pub(crate) fn lagged(series: &[f64], shift: isize, start: usize, end: usize) -> Vec<f64> {
    (start..end)
        .map(|t| series[(t as isize - shift) as usize])
        .collect()
}
