//! Closed forms for stationary AR(1) networks.
//!
//! The stationary covariance solves `Γ_X = C Γ_X Cᵗ + Γ_w`. The bivariate
//! and trivariate information formulas are written in terms of one-step
//! prediction variances. Those depend on how well one channel's past pins
//! down another channel's current value, e.g. `Var(x_{i-1} | y^{i-1})`,
//! which is obtained here from the Riccati recursion of a partially observed
//! state. When the conditioned channel is independent of the observed past,
//! that variance collapses to the marginal `σ_x²` and the formulas reduce to
//! their marginal-variance form, exposed as [`bivariate_marginal_forms`] and
//! [`CaseRates::marginal`].

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::ARProcessSpec;

/// Cauchy stop for the Lyapunov iteration.
pub const LYAPUNOV_TOL: f64 = 1e-14;
const RICCATI_TOL: f64 = 1e-15;
const RICCATI_MAX_STEPS: usize = 1_000_000;

/// Stationary second moments of an AR(1) process.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryMoments {
    pub gamma0: DMatrix<f64>,
}

impl StationaryMoments {
    pub fn variance(&self, ch: usize) -> f64 {
        self.gamma0[(ch, ch)]
    }

    pub fn covariance(&self, a: usize, b: usize) -> f64 {
        self.gamma0[(a, b)]
    }

    /// `max |Γ - CΓCᵗ - Γ_w|`.
    pub fn residual(&self, spec: &ARProcessSpec) -> f64 {
        let c = spec.coupling();
        let r = &self.gamma0 - c * &self.gamma0 * c.transpose() - spec.noise_cov();
        r.amax()
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Solve the discrete Lyapunov equation for the stationary covariance.
///
/// Iterates `Γ ← Γ + A Γ Aᵗ`, `A ← A²` from `Γ = Γ_w`, `A = C`; after `k`
/// steps this equals `2^k` plain fixed-point steps `Γ ← CΓCᵗ + Γ_w`.
pub fn solve_lyapunov(spec: &ARProcessSpec) -> Result<StationaryMoments> {
    spec.check_stationary()?;
    let mut gamma = spec.noise_cov().clone();
    let mut a = spec.coupling().clone();
    for _ in 0..64 {
        let incr = &a * &gamma * a.transpose();
        gamma += &incr;
        symmetrize(&mut gamma);
        a = &a * &a;
        if incr.amax() <= LYAPUNOV_TOL * gamma.amax().max(1.0) {
            // one polishing pass of the plain map
            let c = spec.coupling();
            let mut g = c * &gamma * c.transpose() + spec.noise_cov();
            symmetrize(&mut g);
            return Ok(StationaryMoments { gamma0: g });
        }
    }
    Err(Error::NoConvergence {
        horizon: usize::MAX,
        last_delta: f64::NAN,
    })
}

/// Posterior covariance of the state given the observed channels' history.
///
/// After `k` steps (`k >= 1`) the posterior is `Cov(X_k | O^k)` where `O`
/// are the observed channels.
pub(crate) struct PartialObservationFilter {
    a: DMatrix<f64>,
    q: DMatrix<f64>,
    observed: Vec<usize>,
    posterior: DMatrix<f64>,
}

impl PartialObservationFilter {
    pub fn new(spec: &ARProcessSpec, moments: &StationaryMoments, observed: &[usize]) -> Result<Self> {
        let mut f = Self {
            a: spec.coupling().clone(),
            q: spec.noise_cov().clone(),
            observed: observed.to_vec(),
            posterior: moments.gamma0.clone(),
        };
        f.posterior = f.condition(&f.posterior)?;
        Ok(f)
    }

    fn condition(&self, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let o = &self.observed;
        let k = o.len();
        let n = p.nrows();
        let poo = DMatrix::from_fn(k, k, |i, j| p[(o[i], o[j])]);
        let pxo = DMatrix::from_fn(n, k, |i, j| p[(i, o[j])]);
        let inv = poo
            .cholesky()
            .ok_or_else(|| Error::SingularCovariance("observed block is singular".into()))?
            .inverse();
        let mut post = p - &pxo * inv * pxo.transpose();
        symmetrize(&mut post);
        for &i in o {
            for j in 0..n {
                post[(i, j)] = 0.0;
                post[(j, i)] = 0.0;
            }
        }
        Ok(post)
    }

    pub fn posterior(&self) -> &DMatrix<f64> {
        &self.posterior
    }

    pub fn step(&mut self) -> Result<()> {
        let prior = &self.a * &self.posterior * self.a.transpose() + &self.q;
        self.posterior = self.condition(&prior)?;
        Ok(())
    }

    /// Iterate to the steady-state posterior.
    pub fn converge(&mut self) -> Result<()> {
        for _ in 0..RICCATI_MAX_STEPS {
            let prev = self.posterior.clone();
            self.step()?;
            let delta = (&self.posterior - &prev).amax();
            if delta <= RICCATI_TOL * self.posterior.amax().max(1.0) {
                return Ok(());
            }
        }
        Err(Error::NoConvergence {
            horizon: RICCATI_MAX_STEPS,
            last_delta: f64::NAN,
        })
    }
}

/// Finite-horizon bivariate measures, nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateMeasures {
    pub mi: f64,
    pub di_xy: f64,
    pub di_yx: f64,
    pub iie: f64,
}

/// Per-sample limits for a bivariate process, nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateRates {
    pub di_xy: f64,
    pub di_yx: f64,
    /// `I_∞(Dx → y)`, Schreiber's transfer entropy from x to y.
    pub te_xy: f64,
    pub te_yx: f64,
    pub iie: f64,
}

struct BivariateParts {
    c_xy: f64,
    c_yx: f64,
    sv2: f64,
    sw2: f64,
    gvw: f64,
    moments: StationaryMoments,
}

impl BivariateParts {
    fn new(spec: &ARProcessSpec) -> Result<Self> {
        if spec.dimension() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "bivariate forms need 2 channels, got {}",
                spec.dimension()
            )));
        }
        let w = spec.noise_cov();
        Ok(Self {
            c_xy: spec.coupling_from(0, 1),
            c_yx: spec.coupling_from(1, 0),
            sv2: w[(0, 0)],
            sw2: w[(1, 1)],
            gvw: w[(0, 1)],
            moments: solve_lyapunov(spec)?,
        })
    }

    fn innovation_det(&self) -> f64 {
        self.sv2 * self.sw2 - self.gvw * self.gvw
    }

    fn initial_mi(&self) -> f64 {
        let g = &self.moments.gamma0;
        -0.5 * (1.0 - g[(0, 1)] * g[(0, 1)] / (g[(0, 0)] * g[(1, 1)])).ln()
    }

    /// Sums the closed forms given `Var(x_{i-1} | ·)` and `Var(y_{i-1} | ·)` per step.
    fn accumulate(&self, n: usize, vars: impl Iterator<Item = (f64, f64)>) -> BivariateMeasures {
        let i1 = self.initial_mi();
        let det = self.innovation_det();
        let mut out = BivariateMeasures { mi: i1, di_xy: i1, di_yx: i1, iie: i1 };
        for (px, py) in vars.take(n.saturating_sub(1)) {
            let ey = self.c_xy * self.c_xy * px + self.sw2;
            let ex = self.c_yx * self.c_yx * py + self.sv2;
            out.di_xy += 0.5 * (ey * self.sv2 / det).ln();
            out.di_yx += 0.5 * (ex * self.sw2 / det).ln();
            out.mi += 0.5 * (ex * ey / det).ln();
            out.iie += 0.5 * (self.sv2 * self.sw2 / det).ln();
        }
        out
    }
}

/// Exact bivariate MI, DI in both directions and instantaneous exchange.
///
/// Channel 0 is `x` (innovation `v`), channel 1 is `y` (innovation `w`).
/// With `P^x_i = Var(x_i | y^i)` and `P^y_i = Var(y_i | x^i)`:
///
/// ```text
/// I(x^n -> y^n) = I(x_1;y_1) + ½ Σ_{i=2}^n log[(c_xy² P^x_{i-1} + σ_w²) σ_v² / (σ_v²σ_w² - γ_vw²)]
/// I(x^n; y^n)   = I(x_1;y_1) + ½ Σ_{i=2}^n log[(c_yx² P^y_{i-1} + σ_v²)(c_xy² P^x_{i-1} + σ_w²) / (σ_v²σ_w² - γ_vw²)]
/// IIE           = I(x_1;y_1) + (n-1)/2 log[σ_v²σ_w² / (σ_v²σ_w² - γ_vw²)]
/// ```
pub fn bivariate_closed_forms(spec: &ARProcessSpec, n: usize) -> Result<BivariateMeasures> {
    if n == 0 {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    let parts = BivariateParts::new(spec)?;
    let mut on_y = PartialObservationFilter::new(spec, &parts.moments, &[1])?;
    let mut on_x = PartialObservationFilter::new(spec, &parts.moments, &[0])?;
    let mut vars = Vec::with_capacity(n);
    for _ in 1..n {
        vars.push((on_y.posterior()[(0, 0)], on_x.posterior()[(1, 1)]));
        on_y.step()?;
        on_x.step()?;
    }
    Ok(parts.accumulate(n, vars.into_iter()))
}

/// The same sums with the marginal variances `σ_x²`, `σ_y²` in place of the
/// conditional ones. Exact only when `x_{i-1}` is independent of `y^{i-1}`
/// (and symmetrically), e.g. white `x` with no feedback and uncorrelated noise.
pub fn bivariate_marginal_forms(spec: &ARProcessSpec, n: usize) -> Result<BivariateMeasures> {
    if n == 0 {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    let parts = BivariateParts::new(spec)?;
    let sx2 = parts.moments.variance(0);
    let sy2 = parts.moments.variance(1);
    Ok(parts.accumulate(n, std::iter::repeat((sx2, sy2))))
}

/// Bivariate information rates from the steady-state conditional variances.
pub fn bivariate_rates(spec: &ARProcessSpec) -> Result<BivariateRates> {
    let parts = BivariateParts::new(spec)?;
    let mut on_y = PartialObservationFilter::new(spec, &parts.moments, &[1])?;
    let mut on_x = PartialObservationFilter::new(spec, &parts.moments, &[0])?;
    on_y.converge()?;
    on_x.converge()?;
    let px = on_y.posterior()[(0, 0)];
    let py = on_x.posterior()[(1, 1)];
    let te_xy = 0.5 * (1.0 + parts.c_xy * parts.c_xy * px / parts.sw2).ln();
    let te_yx = 0.5 * (1.0 + parts.c_yx * parts.c_yx * py / parts.sv2).ln();
    let iie = 0.5 * (parts.sv2 * parts.sw2 / parts.innovation_det()).ln();
    Ok(BivariateRates {
        di_xy: te_xy + iie,
        di_yx: te_yx + iie,
        te_xy,
        te_yx,
        iie,
    })
}

/// The two three-node topologies: a chain `x → z → y` (case A) and the same
/// chain with a direct feedback `y → x` (case B).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrivariateCase {
    A,
    B,
}

/// Which channel of a 3-channel spec plays each role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivariateRoles {
    pub x: String,
    pub y: String,
    pub z: String,
}

impl Default for TrivariateRoles {
    fn default() -> Self {
        Self { x: "x".into(), y: "y".into(), z: "z".into() }
    }
}

/// `I_∞(y → x || Dz)` for the trivariate cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseRates {
    /// Marginal-variance form: `½ log(1 + c_yx² σ_y²/σ_v²) - ½ log(1 + γ_vw²/(σ_v²σ_w²))`
    /// for case B, `-½ log(1 - γ_vw²/(σ_v²σ_w²))` for case A.
    pub marginal: f64,
    /// `½ log(1 + c_yx² P_∞/σ_v²) - ½ log(1 - γ_vw²/(σ_v²σ_w²))` with
    /// `P_∞ = lim Var(y_{n-1} | x^{n-1}, z^{n-1})`.
    pub exact: f64,
}

impl CaseRates {
    pub fn discrepancy(&self) -> f64 {
        self.exact - self.marginal
    }
}

pub fn trivariate_case_rates(
    spec: &ARProcessSpec,
    case: TrivariateCase,
    roles: &TrivariateRoles,
) -> Result<CaseRates> {
    if spec.dimension() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "trivariate case needs 3 channels, got {}",
            spec.dimension()
        )));
    }
    let x = spec.channel_index(&roles.x)?;
    let y = spec.channel_index(&roles.y)?;
    let z = spec.channel_index(&roles.z)?;
    if x == y || y == z || x == z {
        return Err(Error::InvalidInput("roles must name distinct channels".into()));
    }
    for (src, dst, label) in [(x, y, "x→y"), (z, x, "z→x"), (y, z, "y→z")] {
        if spec.coupling_from(src, dst) != 0.0 {
            return Err(Error::TopologyMismatch(format!(
                "coupling {label} must be zero in the chain topology"
            )));
        }
    }
    let c_yx = spec.coupling_from(y, x);
    match case {
        TrivariateCase::A if c_yx != 0.0 => {
            return Err(Error::TopologyMismatch("case A requires c_yx = 0".into()))
        }
        TrivariateCase::B if c_yx == 0.0 => {
            return Err(Error::TopologyMismatch("case B requires c_yx ≠ 0".into()))
        }
        _ => {}
    }

    let w = spec.noise_cov();
    let (sv2, sw2, gvw) = (w[(x, x)], w[(y, y)], w[(x, y)]);
    let rho2 = gvw * gvw / (sv2 * sw2);
    let moments = solve_lyapunov(spec)?;
    let instantaneous = -0.5 * (1.0 - rho2).ln();

    let mut filter = PartialObservationFilter::new(spec, &moments, &[x, z])?;
    filter.converge()?;
    let p_inf = filter.posterior()[(y, y)];
    let exact = 0.5 * (1.0 + c_yx * c_yx * p_inf / sv2).ln() + instantaneous;

    let marginal = match case {
        TrivariateCase::A => instantaneous,
        TrivariateCase::B => {
            let sy2 = moments.variance(y);
            0.5 * (1.0 + c_yx * c_yx * sy2 / sv2).ln() - 0.5 * (1.0 + rho2).ln()
        }
    };
    Ok(CaseRates { marginal, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BivariateParams;
    use approx::assert_relative_eq;

    fn spec2(c: [f64; 4], w: [f64; 4]) -> ARProcessSpec {
        ARProcessSpec::new(
            vec!["x".into(), "y".into()],
            DMatrix::from_row_slice(2, 2, &c),
            DMatrix::from_row_slice(2, 2, &w),
        )
        .unwrap()
    }

    #[test]
    fn zero_coupling_gives_noise_cov() {
        let s = spec2([0.0; 4], [1.0, 0.3, 0.3, 2.0]);
        let m = solve_lyapunov(&s).unwrap();
        assert_eq!(m.gamma0, *s.noise_cov());
    }

    #[test]
    fn scalar_lyapunov() {
        let s = ARProcessSpec::new(
            vec!["x".into()],
            DMatrix::from_element(1, 1, 0.5),
            DMatrix::identity(1, 1),
        )
        .unwrap();
        assert_relative_eq!(solve_lyapunov(&s).unwrap().gamma0[(0, 0)], 4.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn lyapunov_matches_plain_iteration() {
        let s = spec2([0.5, 0.4, 0.1, 0.3], [1.0, 0.2, 0.2, 1.0]);
        let m = solve_lyapunov(&s).unwrap();
        // oracle: Γ ← CΓCᵗ + Γ_w until the update stalls at 1e-14
        let c = s.coupling();
        let mut g = s.noise_cov().clone();
        loop {
            let next = c * &g * c.transpose() + s.noise_cov();
            let delta = (&next - &g).amax();
            g = next;
            if delta < 1e-14 {
                break;
            }
        }
        assert!((&m.gamma0 - &g).amax() < 1e-13);
        assert!(m.residual(&s) < 1e-10);
    }

    #[test]
    fn lyapunov_near_unit_root() {
        let s = spec2([0.999, 0.0, 0.0, 0.5], [1.0, 0.0, 0.0, 1.0]);
        let m = solve_lyapunov(&s).unwrap();
        assert_relative_eq!(m.gamma0[(0, 0)], 1.0 / (1.0 - 0.999f64.powi(2)), max_relative = 1e-10);
        assert!(m.residual(&s) < 1e-10);
    }

    #[test]
    fn decoupled_uncorrelated_measures_vanish() {
        let s = ARProcessSpec::bivariate(BivariateParams { c_xx: 0.6, c_yy: -0.3, ..Default::default() })
            .unwrap();
        let f = bivariate_closed_forms(&s, 5).unwrap();
        for v in [f.mi, f.di_xy, f.di_yx, f.iie] {
            assert!(v.abs() < 1e-14);
        }
    }

    #[test]
    fn rates_at_zero_coupling() {
        let s = ARProcessSpec::bivariate(BivariateParams { gamma_vw: 0.5, ..Default::default() }).unwrap();
        let r = bivariate_rates(&s).unwrap();
        assert_relative_eq!(r.di_xy, 0.143_841_036_225_890_2, epsilon = 1e-12);
        assert_relative_eq!(r.di_yx, r.di_xy, epsilon = 1e-15);
        assert_relative_eq!(r.iie, -0.5 * 0.75f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn no_coupling_one_way_gives_lower_bound() {
        let s = ARProcessSpec::bivariate(BivariateParams {
            c_xx: 0.4,
            c_yy: 0.3,
            c_xy: 0.6,
            gamma_vw: 0.3,
            ..Default::default()
        })
        .unwrap();
        let r = bivariate_rates(&s).unwrap();
        assert_relative_eq!(r.di_yx, r.iie, epsilon = 1e-15);
        assert!(r.di_xy > r.iie);
        let s0 = ARProcessSpec::bivariate(BivariateParams { c_yy: 0.8, ..Default::default() }).unwrap();
        assert!(bivariate_rates(&s0).unwrap().di_xy.abs() < 1e-15);
    }

    #[test]
    fn marginal_forms_exact_for_white_source() {
        // x white, no feedback, γ_vw = 0: x_{i-1} ⟂ y^{i-1}
        let s = ARProcessSpec::bivariate(BivariateParams {
            c_yy: 0.5,
            c_xy: 0.8,
            ..Default::default()
        })
        .unwrap();
        let a = bivariate_closed_forms(&s, 6).unwrap();
        let b = bivariate_marginal_forms(&s, 6).unwrap();
        assert_relative_eq!(a.di_xy, b.di_xy, epsilon = 1e-13);
        assert_relative_eq!(a.mi, b.mi, epsilon = 1e-13);
    }

    #[test]
    fn marginal_forms_differ_with_self_memory() {
        let s = ARProcessSpec::bivariate(BivariateParams {
            c_xx: 0.5,
            c_yy: 0.4,
            c_xy: 0.5,
            c_yx: 0.3,
            gamma_vw: 0.2,
            ..Default::default()
        })
        .unwrap();
        let a = bivariate_closed_forms(&s, 6).unwrap();
        let b = bivariate_marginal_forms(&s, 6).unwrap();
        assert!((a.di_xy - b.di_xy).abs() > 1e-2);
    }

    fn chain(c_yx: f64, gamma_vw: f64) -> ARProcessSpec {
        // channel order z, x, y; transition rows are targets
        let mut c = DMatrix::from_diagonal_element(3, 3, 0.3);
        c[(0, 1)] = 0.5; // x -> z
        c[(2, 0)] = 0.5; // z -> y
        c[(1, 2)] = c_yx; // y -> x
        let w = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, gamma_vw, 0.0, gamma_vw, 1.0]);
        ARProcessSpec::new(vec!["z".into(), "x".into(), "y".into()], c, w).unwrap()
    }

    #[test]
    fn case_a_plug_in() {
        let r = trivariate_case_rates(&chain(0.0, 0.6), TrivariateCase::A, &Default::default()).unwrap();
        assert_relative_eq!(r.exact, -0.5 * 0.64f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(r.exact, 0.22314, epsilon = 1e-5);
        assert_eq!(r.marginal, r.exact);
        let r0 = trivariate_case_rates(&chain(0.0, 0.0), TrivariateCase::A, &Default::default()).unwrap();
        assert_eq!(r0.exact, 0.0);
    }

    #[test]
    fn case_topology_is_validated() {
        let roles = TrivariateRoles::default();
        assert!(matches!(
            trivariate_case_rates(&chain(0.2, 0.0), TrivariateCase::A, &roles),
            Err(Error::TopologyMismatch(_))
        ));
        assert!(matches!(
            trivariate_case_rates(&chain(0.0, 0.0), TrivariateCase::B, &roles),
            Err(Error::TopologyMismatch(_))
        ));
        let mut c = chain(0.2, 0.0).coupling().clone();
        c[(1, 0)] = 0.1; // z -> x
        let s = ARProcessSpec::new(
            vec!["z".into(), "x".into(), "y".into()],
            c,
            DMatrix::identity(3, 3),
        )
        .unwrap();
        assert!(matches!(
            trivariate_case_rates(&s, TrivariateCase::B, &roles),
            Err(Error::TopologyMismatch(_))
        ));
    }

    #[test]
    fn case_b_tends_to_case_a() {
        let roles = TrivariateRoles::default();
        let a = trivariate_case_rates(&chain(0.0, 0.4), TrivariateCase::A, &roles).unwrap();
        let mut prev = f64::INFINITY;
        for c in [1e-3, 1e-6] {
            let b = trivariate_case_rates(&chain(c, 0.4), TrivariateCase::B, &roles).unwrap();
            let gap = (b.exact - a.exact).abs();
            assert!(gap < prev);
            assert!(gap < 10.0 * c * c + 1e-14, "{gap}");
            prev = gap;
        }
    }
}
