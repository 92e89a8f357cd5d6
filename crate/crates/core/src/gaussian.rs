//! Exact Gaussian information arithmetic on a [`GaussianJointModel`].
//!
//! Everything reduces to log-determinants of Schur complements. Ordering the
//! conditioning block first, the Cholesky factor of `[C, T]` carries the
//! residual covariance of `T` given `C` in its trailing diagonal, so
//! `log det Γ_{T|C} = 2 Σ log L_jj` over the target rows. This is the
//! determinant recursion `det Γ_{y^k} = ε²(y_k | y^{k-1}) det Γ_{y^{k-1}}`
//! applied one variable at a time.

use std::f64::consts::{E, PI};

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};
use crate::model::{GaussianJointModel, VariableSelector};

/// Relative diagonal jitter applied once when a factorization fails.
pub const JITTER: f64 = 1e-12;
/// A residual variance below this fraction of the marginal variance is
/// treated as exact linear dependence.
pub const SINGULAR_RATIO: f64 = 1e-11;

/// Residual covariance of a target block given conditioners.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionError {
    /// Determinant of the residual covariance (the variance for a scalar target).
    pub variance_det: f64,
    pub log_variance_det: f64,
    pub target: VariableSelector,
    pub conditioners: Vec<VariableSelector>,
}

fn cholesky_with_jitter(m: DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    let n = m.nrows();
    let trace = m.trace();
    if let Some(c) = m.clone().cholesky() {
        return Ok(c);
    }
    let mut jittered = m;
    let eps = JITTER * (trace / n as f64).abs().max(f64::MIN_POSITIVE);
    for i in 0..n {
        jittered[(i, i)] += eps;
    }
    jittered.cholesky().ok_or_else(|| {
        Error::SingularCovariance(format!(
            "{n}x{n} block is not positive definite after jitter {eps:.3e}"
        ))
    })
}

/// `log det` of the residual covariance of `target` given `cond`, by flat index.
pub(crate) fn log_det_residual(cov: &DMatrix<f64>, cond: &[usize], target: &[usize]) -> Result<f64> {
    if target.is_empty() {
        return Ok(0.0);
    }
    let order: Vec<usize> = cond.iter().chain(target).copied().collect();
    let k = order.len();
    let sub = DMatrix::from_fn(k, k, |i, j| cov[(order[i], order[j])]);
    let chol = cholesky_with_jitter(sub)?;
    let l = chol.l_dirty();
    let mut acc = 0.0;
    for j in 0..k {
        let d = l[(j, j)];
        let scale = cov[(order[j], order[j])];
        if !d.is_finite() || d <= 0.0 || d * d < SINGULAR_RATIO * scale {
            return Err(Error::SingularCovariance(format!(
                "variable {} is determined by the preceding ones",
                order[j]
            )));
        }
        if j >= cond.len() {
            acc += 2.0 * d.ln();
        }
    }
    Ok(acc)
}

/// `I(A; B | C)` in nats by flat index, as
/// `½ [log det Γ_{B|C} - log det Γ_{B|C,A}]`.
pub(crate) fn cmi_indices(cov: &DMatrix<f64>, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let without = log_det_residual(cov, c, b)?;
    let ca: Vec<usize> = c.iter().chain(a).copied().collect();
    let with = log_det_residual(cov, &ca, b)?;
    Ok(0.5 * (without - with))
}

/// Flat indices of the selected variables, in selector order, without repeats.
pub fn resolve_selectors(model: &GaussianJointModel, sel: &[VariableSelector]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for s in sel {
        let ch = model.channel_index(&s.channel)?;
        if let Some((a, b)) = s.range.resolve(model.horizon())? {
            for t in a..=b {
                let idx = model.index(ch, t);
                if !out.contains(&idx) {
                    out.push(idx);
                }
            }
        }
    }
    Ok(out)
}

/// Differential entropy `½ log((2πe)^k det Γ)` of the selected variables.
pub fn gaussian_entropy(model: &GaussianJointModel, vars: &[VariableSelector]) -> Result<f64> {
    let idx = resolve_selectors(model, vars)?;
    let logdet = log_det_residual(model.cov(), &[], &idx)?;
    Ok(0.5 * (idx.len() as f64 * (2.0 * PI * E).ln() + logdet))
}

/// Residual (Schur complement) covariance of `target` given `conditioners`.
pub fn prediction_error(
    model: &GaussianJointModel,
    target: &VariableSelector,
    conditioners: &[VariableSelector],
) -> Result<PredictionError> {
    let t = resolve_selectors(model, std::slice::from_ref(target))?;
    if t.is_empty() {
        return Err(Error::InvalidInput("prediction target selects no variables".into()));
    }
    let c: Vec<usize> = resolve_selectors(model, conditioners)?
        .into_iter()
        .filter(|i| !t.contains(i))
        .collect();
    let log_variance_det = log_det_residual(model.cov(), &c, &t)?;
    Ok(PredictionError {
        variance_det: log_variance_det.exp(),
        log_variance_det,
        target: target.clone(),
        conditioners: conditioners.to_vec(),
    })
}

/// `I(A; B | C)` in nats.
pub fn conditional_mutual_information(
    model: &GaussianJointModel,
    a: &[VariableSelector],
    b: &[VariableSelector],
    c: &[VariableSelector],
) -> Result<f64> {
    let c = resolve_selectors(model, c)?;
    let a: Vec<usize> = resolve_selectors(model, a)?
        .into_iter()
        .filter(|i| !c.contains(i))
        .collect();
    let b: Vec<usize> = resolve_selectors(model, b)?
        .into_iter()
        .filter(|i| !c.contains(i))
        .collect();
    if a.iter().any(|i| b.contains(i)) {
        return Err(Error::InvalidInput(
            "A and B overlap; the mutual information is infinite".into(),
        ));
    }
    cmi_indices(model.cov(), &a, &b, &c)
}
