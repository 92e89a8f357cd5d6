#![allow(dead_code)]

use causalflow::{ARProcessSpec, BivariateParams};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Scale `c` so its spectral radius is at most `max_radius`.
fn stabilize(mut c: DMatrix<f64>, max_radius: f64) -> DMatrix<f64> {
    let r = c.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if r > max_radius {
        c *= max_radius / r;
    }
    c
}

/// Random stationary bivariate spec with feedback both ways.
pub fn random_bivariate(rng: &mut ChaCha8Rng) -> ARProcessSpec {
    let p = BivariateParams {
        c_xx: rng.random_range(-0.8..0.8),
        c_yy: rng.random_range(-0.8..0.8),
        c_xy: rng.random_range(-0.8..0.8),
        c_yx: rng.random_range(-0.8..0.8),
        sigma_v2: rng.random_range(0.5..2.0),
        sigma_w2: rng.random_range(0.5..2.0),
        gamma_vw: 0.0,
    };
    let rho: f64 = rng.random_range(-0.7..0.7);
    let p = BivariateParams { gamma_vw: rho * (p.sigma_v2 * p.sigma_w2).sqrt(), ..p };
    let spec = ARProcessSpec::bivariate(p).unwrap();
    let c = stabilize(spec.coupling().clone(), 0.9);
    ARProcessSpec::new(spec.channel_names().to_vec(), c, spec.noise_cov().clone()).unwrap()
}

/// Random bivariate spec without feedback from y to x and with independent innovations.
pub fn random_no_feedback(rng: &mut ChaCha8Rng) -> ARProcessSpec {
    ARProcessSpec::bivariate(BivariateParams {
        c_xx: rng.random_range(-0.9..0.9),
        c_yy: rng.random_range(-0.9..0.9),
        c_xy: rng.random_range(-1.0..1.0),
        c_yx: 0.0,
        sigma_v2: rng.random_range(0.5..2.0),
        sigma_w2: rng.random_range(0.5..2.0),
        gamma_vw: 0.0,
    })
    .unwrap()
}

/// Random stationary spec of dimension `d` with correlated innovations.
pub fn random_spec(rng: &mut ChaCha8Rng, names: &[&str], max_radius: f64) -> ARProcessSpec {
    let d = names.len();
    let c = DMatrix::from_fn(d, d, |_, _| rng.random_range(-0.6..0.6));
    let b = DMatrix::from_fn(d, d, |_, _| rng.random_range(-0.5..0.5));
    let w = &b * b.transpose() + DMatrix::identity(d, d) * 0.5;
    let w = (&w + w.transpose()) * 0.5;
    ARProcessSpec::new(
        names.iter().map(|s| s.to_string()).collect(),
        stabilize(c, max_radius),
        w,
    )
    .unwrap()
}
