//! Sample paths of AR(1) processes and pooled window covariances.
//!
//! Every ensemble member draws from its own ChaCha stream keyed by
//! `(seed, member)`, so members are independent and the ensemble is the same
//! whether it is generated sequentially or in parallel.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::analytic::solve_lyapunov;
use crate::error::{Error, Result};
use crate::exec;
use crate::model::{ARProcessSpec, GaussianJointModel, ModelSource, TimeSeriesPanel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub path_length: usize,
    pub ensemble_size: usize,
    pub seed: u64,
    /// Discarded leading samples; only used when `stationary_init` is false.
    pub burn_in: usize,
    /// Draw `X_1` from the stationary law instead of starting at zero.
    pub stationary_init: bool,
}

impl SimulationConfig {
    pub fn new(path_length: usize, ensemble_size: usize, seed: u64) -> Self {
        Self { path_length, ensemble_size, seed, burn_in: 0, stationary_init: true }
    }

    fn validate(&self) -> Result<()> {
        if self.path_length < 2 {
            return Err(Error::InvalidInput("path_length must be at least 2".into()));
        }
        if self.ensemble_size == 0 {
            return Err(Error::InvalidInput("ensemble_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Lower Cholesky factor as a dense row-major array.
fn lower_factor(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::SingularCovariance("covariance has no Cholesky factor".into()))?;
    let l = chol.l();
    let d = m.nrows();
    Ok((0..d * d).map(|k| l[(k / d, k % d)]).collect())
}

struct Sampler {
    d: usize,
    coupling: Vec<f64>,
    noise_factor: Vec<f64>,
    init_factor: Option<Vec<f64>>,
}

impl Sampler {
    fn new(spec: &ARProcessSpec, stationary_init: bool) -> Result<Self> {
        let d = spec.dimension();
        let c = spec.coupling();
        let init_factor = if stationary_init {
            Some(lower_factor(&solve_lyapunov(spec)?.gamma0)?)
        } else {
            spec.check_stationary()?;
            None
        };
        Ok(Self {
            d,
            coupling: (0..d * d).map(|k| c[(k / d, k % d)]).collect(),
            noise_factor: lower_factor(spec.noise_cov())?,
            init_factor,
        })
    }

    fn correlated(&self, factor: &[f64], rng: &mut ChaCha8Rng, xi: &mut [f64], out: &mut [f64]) {
        let d = self.d;
        for v in xi.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        for i in 0..d {
            out[i] = (0..=i).map(|j| factor[i * d + j] * xi[j]).sum();
        }
    }

    fn path(&self, len: usize, burn_in: usize, seed: u64, member: u64) -> Vec<f64> {
        let d = self.d;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(member);
        let mut xi = vec![0.0; d];
        let mut noise = vec![0.0; d];
        let mut cur = vec![0.0; d];
        let skip = if self.init_factor.is_some() { 0 } else { burn_in };
        match &self.init_factor {
            Some(f) => self.correlated(f, &mut rng, &mut xi, &mut cur),
            None => self.correlated(&self.noise_factor, &mut rng, &mut xi, &mut cur),
        }
        let mut out = Vec::with_capacity(len * d);
        for t in 0..len + skip {
            if t > 0 {
                self.correlated(&self.noise_factor, &mut rng, &mut xi, &mut noise);
                let next: Vec<f64> = (0..d)
                    .map(|i| {
                        (0..d).map(|j| self.coupling[i * d + j] * cur[j]).sum::<f64>() + noise[i]
                    })
                    .collect();
                cur = next;
            }
            if t >= skip {
                out.extend_from_slice(&cur);
            }
        }
        out
    }
}

/// One sample path (ensemble member 0).
pub fn simulate(spec: &ARProcessSpec, config: &SimulationConfig) -> Result<TimeSeriesPanel> {
    let single = SimulationConfig { ensemble_size: 1, ..*config };
    Ok(simulate_ensemble(spec, &single)?.remove(0))
}

/// `ensemble_size` independent sample paths, deterministic in `seed`.
pub fn simulate_ensemble(
    spec: &ARProcessSpec,
    config: &SimulationConfig,
) -> Result<Vec<TimeSeriesPanel>> {
    config.validate()?;
    let sampler = Sampler::new(spec, config.stationary_init)?;
    let names = spec.channel_names().to_vec();
    exec::map_range(config.ensemble_size, |r| {
        let data = sampler.path(config.path_length, config.burn_in, config.seed, r as u64);
        TimeSeriesPanel::from_row_major(names.clone(), data)
    })
    .into_iter()
    .collect()
}

/// Pooled, mean-centered sample covariance of all length-`horizon` windows.
///
/// Windows overlap within a path; the returned model records the window
/// count and that flag in its [`ModelSource`].
pub fn estimate_window_covariance(
    ensemble: &[TimeSeriesPanel],
    horizon: usize,
) -> Result<GaussianJointModel> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::InsufficientData("empty ensemble".into()))?;
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    let d = first.dimension();
    for p in ensemble {
        if p.channels() != first.channels() {
            return Err(Error::DimensionMismatch("ensemble panels have different channels".into()));
        }
        if p.sample_count() < horizon {
            return Err(Error::InsufficientData(format!(
                "panel of length {} is shorter than the window {horizon}",
                p.sample_count()
            )));
        }
    }
    let k = horizon * d;
    let windows: usize = ensemble.iter().map(|p| p.sample_count() - horizon + 1).sum();
    if windows < 10 * k {
        return Err(Error::InsufficientData(format!(
            "{windows} windows for a {k}-dimensional covariance, need {}",
            10 * k
        )));
    }
    let overlapping = windows > ensemble.len();

    // Window starting at row s is the contiguous slice data[s*d .. (s+horizon)*d].
    let sums = exec::map_slice(ensemble, |p| {
        let data = p.as_row_major();
        let mut acc = vec![0.0; k];
        for s in 0..=p.sample_count() - horizon {
            for (a, v) in acc.iter_mut().zip(&data[s * d..s * d + k]) {
                *a += v;
            }
        }
        acc
    });
    let mut mean = vec![0.0; k];
    for part in &sums {
        for (m, v) in mean.iter_mut().zip(part) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= windows as f64);

    let products = exec::map_slice(ensemble, |p| {
        let data = p.as_row_major();
        let mut acc = vec![0.0; k * (k + 1) / 2];
        let mut w = vec![0.0; k];
        for s in 0..=p.sample_count() - horizon {
            for (j, wj) in w.iter_mut().enumerate() {
                *wj = data[s * d + j] - mean[j];
            }
            let mut idx = 0;
            for i in 0..k {
                let wi = w[i];
                for wj in &w[i..] {
                    acc[idx] += wi * wj;
                    idx += 1;
                }
            }
        }
        acc
    });
    let mut packed = vec![0.0; k * (k + 1) / 2];
    for part in &products {
        for (a, v) in packed.iter_mut().zip(part) {
            *a += v;
        }
    }
    let mut cov = DMatrix::zeros(k, k);
    let mut idx = 0;
    for i in 0..k {
        for j in i..k {
            let v = packed[idx] / windows as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
            idx += 1;
        }
    }
    Ok(GaussianJointModel::trusted(
        first.channels().to_vec(),
        horizon,
        cov,
        ModelSource::Empirical { windows, overlapping },
    ))
}
