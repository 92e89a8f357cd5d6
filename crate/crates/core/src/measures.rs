//! Information measures on a stacked-window Gaussian model.
//!
//! Finite-horizon measures are sums of per-step conditional mutual
//! informations; the summands are independent given the model and are
//! evaluated through [`crate::exec`], then added in time order. Rates are
//! per-step limits found by doubling the horizon until successive values
//! agree (Cauchy criterion).

use crate::error::{Error, Result};
use crate::exec;
use crate::gaussian::{cmi_indices, log_det_residual};
use crate::model::{
    build_window_model, ARProcessSpec, Conditioner, ConditioningMode, GaussianJointModel, Horizon,
    MeasureKind, MeasureReport, Method, TimeSeriesPanel,
};
use crate::regression::{lagged, residual_sum_squares};

/// Summand families shared by finite sums and rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermKind {
    /// `I(x^n; y^n)`: per-step increment `I(x^i; y_i | y^{i-1}) + I(y^{i-1}; x_i | x^{i-1})`.
    MutualInformation,
    /// `I(x^n → y^n)`: `I(x^i; y_i | y^{i-1})`.
    DirectedInformation,
    /// `I(Dx^n → y^n)`: `I(x^{i-1}; y_i | y^{i-1})`.
    DelayedDirectedInformation,
    /// `I(x^n → y^n || Dx^n)`: `I(x_i; y_i | x^{i-1}, y^{i-1})`.
    InstantaneousExchange,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    pub initial_horizon: usize,
    pub tol: f64,
    pub max_horizon: usize,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self { initial_horizon: 8, tol: 1e-9, max_horizon: 4096 }
    }
}

fn span(model: &GaussianJointModel, ch: usize, a: usize, b: usize) -> Vec<usize> {
    (a..=b).map(|t| model.index(ch, t)).collect()
}

/// Channel indices of the pair and of the conditioners, with checks.
struct Roles {
    x: usize,
    y: usize,
    side: Vec<(usize, ConditioningMode)>,
}

impl Roles {
    fn resolve(
        channels: &[String],
        x: &str,
        y: &str,
        cond: &[Conditioner],
    ) -> Result<Self> {
        let find = |name: &str| {
            channels
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::UnknownChannel(name.to_string()))
        };
        let xi = find(x)?;
        let yi = find(y)?;
        if xi == yi {
            return Err(Error::InvalidInput("source and target must differ".into()));
        }
        let mut side = Vec::with_capacity(cond.len());
        for c in cond {
            let z = find(&c.channel)?;
            if z == xi || z == yi || side.iter().any(|(s, _)| *s == z) {
                return Err(Error::InvalidInput(format!(
                    "conditioning channel `{}` repeats a channel of the analysis",
                    c.channel
                )));
            }
            side.push((z, c.mode));
        }
        Ok(Self { x: xi, y: yi, side })
    }

    fn has_full(&self) -> bool {
        self.side.iter().any(|(_, m)| *m == ConditioningMode::Full)
    }

    /// Side-information indices for the summand at time `i`; full mode reaches `full_end`.
    fn side_at(&self, model: &GaussianJointModel, i: usize, full_end: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &(z, mode) in &self.side {
            let end = match mode {
                ConditioningMode::Full => full_end,
                ConditioningMode::Causal => i,
                ConditioningMode::Delayed => i - 1,
            };
            out.extend(span(model, z, 1, end));
        }
        out
    }

    fn swapped(&self) -> Self {
        Self { x: self.y, y: self.x, side: self.side.clone() }
    }
}

fn summand(
    model: &GaussianJointModel,
    kind: TermKind,
    r: &Roles,
    i: usize,
    full_end: usize,
) -> Result<f64> {
    let cov = model.cov();
    let mut cond = span(model, r.y, 1, i - 1);
    cond.extend(r.side_at(model, i, full_end));
    let target = [model.index(r.y, i)];
    match kind {
        TermKind::DirectedInformation => cmi_indices(cov, &span(model, r.x, 1, i), &target, &cond),
        TermKind::DelayedDirectedInformation => {
            cmi_indices(cov, &span(model, r.x, 1, i - 1), &target, &cond)
        }
        TermKind::InstantaneousExchange => {
            cond.extend(span(model, r.x, 1, i - 1));
            cmi_indices(cov, &[model.index(r.x, i)], &target, &cond)
        }
        TermKind::MutualInformation => {
            let fwd = summand(model, TermKind::DirectedInformation, r, i, full_end)?;
            let back = summand(model, TermKind::DelayedDirectedInformation, &r.swapped(), i, full_end)?;
            Ok(fwd + back)
        }
    }
}

fn check_horizon(model: &GaussianJointModel, n: usize) -> Result<()> {
    if n == 0 || n > model.horizon() {
        return Err(Error::InvalidInput(format!(
            "horizon {n} outside 1..={}",
            model.horizon()
        )));
    }
    Ok(())
}

fn summed(
    model: &GaussianJointModel,
    kind: TermKind,
    x: &str,
    y: &str,
    n: usize,
    cond: &[Conditioner],
) -> Result<f64> {
    check_horizon(model, n)?;
    let roles = Roles::resolve(model.channels(), x, y, cond)?;
    let terms = exec::try_map_range(n, |k| summand(model, kind, &roles, k + 1, n))?;
    Ok(terms.iter().sum())
}

fn report_kind(kind: TermKind, cond: &[Conditioner]) -> MeasureKind {
    match kind {
        TermKind::MutualInformation => MeasureKind::MutualInformation,
        TermKind::DirectedInformation if cond.is_empty() => MeasureKind::DirectedInformation,
        TermKind::DirectedInformation => MeasureKind::DirectedInformationCausalCond,
        TermKind::DelayedDirectedInformation => MeasureKind::DelayedDirectedInformation,
        TermKind::InstantaneousExchange => MeasureKind::InstantaneousExchange,
    }
}

fn method_of(model: &GaussianJointModel) -> Method {
    match model.source() {
        crate::model::ModelSource::Empirical { .. } => Method::Empirical,
        _ => Method::Analytic,
    }
}

/// `I(x^n → y^n)`, optionally conditioned: `Σ_i I(x^i; y_i | y^{i-1}, z)` where
/// `z` is `z^n`, `z^i` or `z^{i-1}` per conditioner mode.
pub fn directed_information(
    model: &GaussianJointModel,
    x: &str,
    y: &str,
    n: usize,
    cond: &[Conditioner],
) -> Result<MeasureReport> {
    let kind = TermKind::DirectedInformation;
    let v = summed(model, kind, x, y, n, cond)?;
    Ok(MeasureReport::new(
        report_kind(kind, cond),
        v,
        Horizon::Steps(n),
        x,
        y,
        cond,
        method_of(model),
    ))
}

/// `I(Dx^n → y^n) = Σ_i I(x^{i-1}; y_i | y^{i-1}, z)`; the first summand is zero.
pub fn delayed_directed_information(
    model: &GaussianJointModel,
    x: &str,
    y: &str,
    n: usize,
    cond: &[Conditioner],
) -> Result<MeasureReport> {
    let kind = TermKind::DelayedDirectedInformation;
    let v = summed(model, kind, x, y, n, cond)?;
    Ok(MeasureReport::new(
        report_kind(kind, cond),
        v,
        Horizon::Steps(n),
        x,
        y,
        cond,
        method_of(model),
    ))
}

/// `Σ_i I(x_i; y_i | x^{i-1}, y^{i-1}, z)`, symmetric in `x` and `y`.
pub fn instantaneous_information_exchange(
    model: &GaussianJointModel,
    x: &str,
    y: &str,
    n: usize,
    cond: &[Conditioner],
) -> Result<MeasureReport> {
    let kind = TermKind::InstantaneousExchange;
    let v = summed(model, kind, x, y, n, cond)?;
    Ok(MeasureReport::new(
        report_kind(kind, cond),
        v,
        Horizon::Steps(n),
        x,
        y,
        cond,
        method_of(model),
    ))
}

/// Block mutual information `I(x^n; y^n | Z)`.
///
/// `Z` holds `z^n` for full and causal conditioners and `z^{n-1}` for
/// delayed ones.
pub fn mutual_information_block(
    model: &GaussianJointModel,
    x: &str,
    y: &str,
    n: usize,
    cond: &[Conditioner],
) -> Result<MeasureReport> {
    check_horizon(model, n)?;
    let r = Roles::resolve(model.channels(), x, y, cond)?;
    let mut z = Vec::new();
    for &(ch, mode) in &r.side {
        let end = if mode == ConditioningMode::Delayed { n - 1 } else { n };
        z.extend(span(model, ch, 1, end));
    }
    let v = cmi_indices(model.cov(), &span(model, r.x, 1, n), &span(model, r.y, 1, n), &z)?;
    Ok(MeasureReport::new(
        MeasureKind::MutualInformation,
        v,
        Horizon::Steps(n),
        x,
        y,
        cond,
        method_of(model),
    ))
}

/// Single-step transfer entropy
/// `I(x_{n-l+1}^{n-1}; y_n | y_{n-k+1}^{n-1})`.
pub fn transfer_entropy(
    model: &GaussianJointModel,
    x: &str,
    y: &str,
    k: usize,
    l: usize,
    n: usize,
) -> Result<MeasureReport> {
    check_horizon(model, n)?;
    if k == 0 || l == 0 || k > n || l > n {
        return Err(Error::InvalidInput(format!(
            "need 1 <= k, l <= n, got k={k}, l={l}, n={n}"
        )));
    }
    let r = Roles::resolve(model.channels(), x, y, &[])?;
    let v = cmi_indices(
        model.cov(),
        &span(model, r.x, n - l + 1, n - 1),
        &[model.index(r.y, n)],
        &span(model, r.y, n - k + 1, n - 1),
    )?;
    Ok(MeasureReport::new(
        MeasureKind::TransferEntropy,
        v,
        Horizon::Steps(n),
        x,
        y,
        &[],
        method_of(model),
    ))
}

/// Per-step summand evaluated at the end of the model window.
///
/// With a full-mode conditioner the window must have odd horizon `2m - 1`;
/// the summand is taken at time `m` so side information extends `m - 1`
/// steps into the future as well as the past.
pub fn rate_term(
    model: &GaussianJointModel,
    kind: TermKind,
    x: &str,
    y: &str,
    cond: &[Conditioner],
) -> Result<f64> {
    let roles = Roles::resolve(model.channels(), x, y, cond)?;
    let h = model.horizon();
    let t = if roles.has_full() {
        if h.is_multiple_of(2) {
            return Err(Error::InvalidInput(
                "two-sided conditioning needs an odd window".into(),
            ));
        }
        h.div_ceil(2)
    } else {
        h
    };
    summand(model, kind, &roles, t, h)
}

/// Window horizon used to evaluate a rate term at step `n`.
pub fn rate_window(n: usize, cond: &[Conditioner]) -> usize {
    if cond.iter().any(|c| c.mode == ConditioningMode::Full) {
        2 * n - 1
    } else {
        n
    }
}

/// Doubles `n` from `opts.initial_horizon` until `|f(2n) - f(n)| < tol`.
fn converge(opts: &RateOptions, f: impl Fn(usize) -> Result<f64>) -> Result<(f64, usize)> {
    let mut n = opts.initial_horizon.max(2);
    let mut prev = f(n)?;
    let mut last_delta = f64::NAN;
    while 2 * n <= opts.max_horizon {
        let v = f(2 * n)?;
        last_delta = (v - prev).abs();
        n *= 2;
        if last_delta < opts.tol {
            return Ok((v, n));
        }
        prev = v;
    }
    Err(Error::NoConvergence { horizon: n, last_delta })
}

/// Per-sample limit of an information measure for a stationary AR(1) spec.
pub fn measure_rate(
    spec: &ARProcessSpec,
    kind: TermKind,
    x: &str,
    y: &str,
    cond: &[Conditioner],
    opts: &RateOptions,
) -> Result<MeasureReport> {
    spec.check_stationary()?;
    Roles::resolve(spec.channel_names(), x, y, cond)?;
    let (v, reached) = converge(opts, |n| {
        let model = build_window_model(spec, rate_window(n, cond))?;
        rate_term(&model, kind, x, y, cond)
    })?;
    let mut rep = MeasureReport::new(
        report_kind(kind, cond),
        v,
        Horizon::Rate,
        x,
        y,
        cond,
        Method::Analytic,
    );
    rep.horizon_reached = Some(reached);
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GewekeKind {
    /// Linear feedback `F_{x→y}`.
    Forward,
    /// Instantaneous linear feedback `F_{x.y}`.
    Instantaneous,
}

/// How side channels enter a Geweke regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GewekeConditioning {
    /// Whole record of `z`, past and future.
    Full,
    /// Strict past `z^{n-1}`.
    Causal,
}

/// Geweke index from asymptotic prediction-error variances,
/// `F = log(ε_restricted / ε_full)` with `ε` the residual standard deviation.
///
/// `Forward` predicts `y_n` from `y^{n-1}, z` with and without `x^{n-1}`.
/// `Instantaneous` predicts `x_n` from `x^{n-1}, y^{n-1}, z` with and
/// without `y_n`.
pub fn geweke_index(
    spec: &ARProcessSpec,
    kind: GewekeKind,
    x: &str,
    y: &str,
    side: &[String],
    mode: GewekeConditioning,
    opts: &RateOptions,
) -> Result<MeasureReport> {
    spec.check_stationary()?;
    let cond = geweke_conditioners(side, mode);
    let roles = Roles::resolve(spec.channel_names(), x, y, &cond)?;
    let (v, reached) = converge(opts, |n| {
        let horizon = match mode {
            GewekeConditioning::Full => 2 * n - 1,
            GewekeConditioning::Causal => n,
        };
        let model = build_window_model(spec, horizon)?;
        let zs: Vec<usize> = roles
            .side
            .iter()
            .flat_map(|&(z, _)| match mode {
                GewekeConditioning::Full => span(&model, z, 1, horizon),
                GewekeConditioning::Causal => span(&model, z, 1, n - 1),
            })
            .collect();
        let cov = model.cov();
        let (target, base, extra) = match kind {
            GewekeKind::Forward => {
                let mut base = span(&model, roles.y, 1, n - 1);
                base.extend(&zs);
                (model.index(roles.y, n), base, span(&model, roles.x, 1, n - 1))
            }
            GewekeKind::Instantaneous => {
                let mut base = span(&model, roles.x, 1, n - 1);
                base.extend(span(&model, roles.y, 1, n - 1));
                base.extend(&zs);
                (model.index(roles.x, n), base, vec![model.index(roles.y, n)])
            }
        };
        let restricted = log_det_residual(cov, &base, &[target])?;
        let mut all = base;
        all.extend(extra);
        let full = log_det_residual(cov, &all, &[target])?;
        Ok(0.5 * (restricted - full))
    })?;
    let mut rep = MeasureReport::new(
        geweke_measure_kind(kind),
        v,
        Horizon::Rate,
        x,
        y,
        &cond,
        Method::Analytic,
    );
    rep.horizon_reached = Some(reached);
    Ok(rep)
}

fn geweke_measure_kind(kind: GewekeKind) -> MeasureKind {
    match kind {
        GewekeKind::Forward => MeasureKind::GewekeForward,
        GewekeKind::Instantaneous => MeasureKind::GewekeInstantaneous,
    }
}

fn geweke_conditioners(side: &[String], mode: GewekeConditioning) -> Vec<Conditioner> {
    let m = match mode {
        GewekeConditioning::Full => ConditioningMode::Full,
        GewekeConditioning::Causal => ConditioningMode::Delayed,
    };
    side.iter().map(|z| Conditioner::new(z.clone(), m)).collect()
}

/// Geweke index estimated by least squares with `lag` lags per channel.
///
/// Full-mode side channels enter with leads and lags `-lag..=lag`.
/// Requires at least `20 * lag` samples.
pub fn geweke_index_empirical(
    panel: &TimeSeriesPanel,
    kind: GewekeKind,
    x: &str,
    y: &str,
    side: &[String],
    mode: GewekeConditioning,
    lag: usize,
) -> Result<MeasureReport> {
    let cond = geweke_conditioners(side, mode);
    let v = empirical_geweke_value(panel, kind, x, y, side, mode, lag)?;
    Ok(MeasureReport::new(
        geweke_measure_kind(kind),
        v,
        Horizon::Rate,
        x,
        y,
        &cond,
        Method::Empirical,
    ))
}

pub(crate) fn empirical_geweke_value(
    panel: &TimeSeriesPanel,
    kind: GewekeKind,
    x: &str,
    y: &str,
    side: &[String],
    mode: GewekeConditioning,
    lag: usize,
) -> Result<f64> {
    if lag == 0 {
        return Err(Error::InvalidInput("lag must be positive".into()));
    }
    let n = panel.sample_count();
    if n < 20 * lag {
        return Err(Error::InsufficientData(format!(
            "{n} samples, need at least {} for lag {lag}",
            20 * lag
        )));
    }
    let cond = geweke_conditioners(side, mode);
    let roles = Roles::resolve(panel.channels(), x, y, &cond)?;
    let (xs, ys) = (panel.column(roles.x), panel.column(roles.y));
    let lead = if mode == GewekeConditioning::Full { lag } else { 0 };
    let (start, end) = (lag, n - lead);
    let lags_of = |s: &[f64]| -> Vec<Vec<f64>> {
        (1..=lag as isize).map(|k| lagged(s, k, start, end)).collect()
    };
    let mut zcols = Vec::new();
    for &(z, _) in &roles.side {
        let s = panel.column(z);
        match mode {
            GewekeConditioning::Causal => zcols.extend(lags_of(&s)),
            GewekeConditioning::Full => {
                zcols.extend((-(lag as isize)..=lag as isize).map(|k| lagged(&s, k, start, end)))
            }
        }
    }
    let (target, mut base, extra) = match kind {
        GewekeKind::Forward => (lagged(&ys, 0, start, end), lags_of(&ys), lags_of(&xs)),
        GewekeKind::Instantaneous => {
            let mut b = lags_of(&xs);
            b.extend(lags_of(&ys));
            (lagged(&xs, 0, start, end), b, vec![lagged(&ys, 0, start, end)])
        }
    };
    base.extend(zcols);
    let restricted = residual_sum_squares(&target, &base)?;
    base.extend(extra);
    let full = residual_sum_squares(&target, &base)?;
    if full.is_nan() || full <= 0.0 {
        return Err(Error::SingularCovariance("perfect in-sample fit".into()));
    }
    Ok(0.5 * (restricted / full).ln())
}
