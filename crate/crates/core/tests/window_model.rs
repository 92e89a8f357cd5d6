mod common;

use causalflow::{
    build_window_model, directed_information, estimate_window_covariance, simulate_ensemble,
    solve_lyapunov, ARProcessSpec, Conditioner, ConditioningMode, SimulationConfig,
};
use common::{random_spec, rng};
use nalgebra::{dmatrix, DMatrix};

fn upper_triangular_spec() -> ARProcessSpec {
    ARProcessSpec::new(
        vec!["a".into(), "b".into()],
        dmatrix![0.9, 0.5; 0.0, 0.9],
        DMatrix::identity(2, 2),
    )
    .unwrap()
}

#[test]
fn window_covariance_matches_monte_carlo() {
    let spec = upper_triangular_spec();
    let cfg = SimulationConfig::new(4, 1_000_000, 11);
    let ensemble = simulate_ensemble(&spec, &cfg).unwrap();
    let est = estimate_window_covariance(&ensemble, 4).unwrap();
    let exact = build_window_model(&spec, 4).unwrap();
    let (s, e) = (est.cov(), exact.cov());
    let samples = cfg.ensemble_size as f64;
    for i in 0..8 {
        for j in 0..8 {
            let se = ((e[(i, i)] * e[(j, j)] + e[(i, j)].powi(2)) / samples).sqrt();
            assert!(
                (s[(i, j)] - e[(i, j)]).abs() < 3.0 * se,
                "entry ({i},{j}): {} vs {} (se {se:.2e})",
                s[(i, j)],
                e[(i, j)]
            );
        }
    }
}

#[test]
fn stationary_covariance_solves_lyapunov() {
    for seed in 0..10 {
        let spec = random_spec(&mut rng(seed), &["a", "b", "c", "d"], 0.97);
        let g = solve_lyapunov(&spec).unwrap().gamma0;
        let c = spec.coupling();
        let r = &g - c * &g * c.transpose() - spec.noise_cov();
        assert!(r.amax() < 1e-12, "residual {}", r.amax());
    }
}

#[test]
fn leading_block_is_the_shorter_window() {
    let spec = random_spec(&mut rng(5), &["a", "b", "c"], 0.9);
    let long = build_window_model(&spec, 9).unwrap();
    let short = build_window_model(&spec, 4).unwrap();
    let lead = long.leading(4).unwrap();
    assert!((lead.cov() - short.cov()).amax() < 1e-12);
}

#[test]
fn window_is_stationary_along_the_diagonal() {
    let spec = random_spec(&mut rng(6), &["a", "b"], 0.9);
    let m = build_window_model(&spec, 6).unwrap();
    let c = m.cov();
    for t in 1..6 {
        for a in 0..2 {
            for b in 0..2 {
                let first = c[(m.index(a, 1), m.index(b, 2))];
                let later = c[(m.index(a, t), m.index(b, t + 1))];
                assert!((first - later).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn measures_follow_channels_under_permutation() {
    let spec = random_spec(&mut rng(7), &["x", "y", "z"], 0.9);
    let perm = spec.permuted(&[2, 0, 1]).unwrap();
    assert_ne!(spec.channel_names(), perm.channel_names());
    let a = build_window_model(&spec, 5).unwrap();
    let b = build_window_model(&perm, 5).unwrap();
    let z = [Conditioner::new("z", ConditioningMode::Causal)];
    for (x, y) in [("x", "y"), ("y", "x"), ("z", "x")] {
        let cond: &[Conditioner] = if x == "z" { &[] } else { &z };
        let va = directed_information(&a, x, y, 5, cond).unwrap().value_nats;
        let vb = directed_information(&b, x, y, 5, cond).unwrap().value_nats;
        assert!((va - vb).abs() < 1e-10, "{x}->{y}: {va} vs {vb}");
    }
}
