//! Shared domain types: observed panels, AR(1) specifications, stacked-window
//! Gaussian models, variable selectors, reports and graphs.

use std::collections::HashSet;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::analytic::solve_lyapunov;
use crate::error::{Error, Result};

/// Symmetry tolerance for covariance inputs.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Spectral radius at or above `1 - STATIONARITY_MARGIN` is rejected.
pub const STATIONARITY_MARGIN: f64 = 1e-9;
/// Smallest eigenvalue accepted for a user-supplied covariance.
pub const PSD_TOL: f64 = -1e-10;

fn check_unique(names: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate channel name `{n}`")));
        }
    }
    Ok(())
}

fn check_symmetric(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    for i in 0..m.nrows() {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::InvalidInput(format!(
                    "{what} is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} has non-finite entries")));
    }
    Ok(())
}

/// Synchronized multivariate samples, rows are time steps.
///
/// Values are stored as given. Mean-centering happens where estimates are
/// formed, so a panel written to disk and read back is bit-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPanel {
    channels: Vec<String>,
    data: Vec<f64>,
    samples: usize,
}

impl TimeSeriesPanel {
    /// Build from row-major data (`samples * channels.len()` values).
    pub fn from_row_major(channels: Vec<String>, data: Vec<f64>) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidInput("panel needs at least one channel".into()));
        }
        check_unique(&channels)?;
        let d = channels.len();
        if !data.len().is_multiple_of(d) {
            return Err(Error::DimensionMismatch(format!(
                "{} values do not fill rows of {d} channels",
                data.len()
            )));
        }
        let samples = data.len() / d;
        if samples == 0 {
            return Err(Error::InsufficientData("panel has no samples".into()));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at row {}, channel `{}`",
                pos / d + 1,
                channels[pos % d]
            )));
        }
        Ok(Self { channels, data, samples })
    }

    pub fn from_rows(channels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let d = channels.len();
        let mut data = Vec::with_capacity(rows.len() * d);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} values, expected {d}",
                    t + 1,
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(channels, data)
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn dimension(&self) -> usize {
        self.channels.len()
    }

    pub fn sample_count(&self) -> usize {
        self.samples
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let d = self.dimension();
        &self.data[t * d..(t + 1) * d]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn channel_index(&self, name: &str) -> Result<usize> {
        self.channels
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownChannel(name.to_string()))
    }

    pub fn column(&self, ch: usize) -> Vec<f64> {
        self.data
            .iter()
            .skip(ch)
            .step_by(self.dimension())
            .copied()
            .collect()
    }

    /// Copy with channel `ch` replaced by `values`.
    pub fn with_column(&self, ch: usize, values: &[f64]) -> Self {
        let d = self.dimension();
        let mut data = self.data.clone();
        for (t, v) in values.iter().enumerate() {
            data[t * d + ch] = *v;
        }
        Self { channels: self.channels.clone(), data, samples: self.samples }
    }
}

/// First-order vector autoregression `X_n = C X_{n-1} + W_n`.
///
/// `coupling` is the transition matrix `C` acting on column vectors, so the
/// coefficient carrying channel `i` into channel `j` sits at row `j`, column
/// `i`. [`ARProcessSpec::coupling_from`] reads it with source-first indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct ARProcessSpec {
    channel_names: Vec<String>,
    coupling: DMatrix<f64>,
    noise_cov: DMatrix<f64>,
}

impl ARProcessSpec {
    pub fn new(
        channel_names: Vec<String>,
        coupling: DMatrix<f64>,
        noise_cov: DMatrix<f64>,
    ) -> Result<Self> {
        let d = channel_names.len();
        if d == 0 {
            return Err(Error::InvalidInput("spec needs at least one channel".into()));
        }
        check_unique(&channel_names)?;
        if coupling.shape() != (d, d) || noise_cov.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "{d} channels but coupling is {:?} and noise_cov is {:?}",
                coupling.shape(),
                noise_cov.shape()
            )));
        }
        if coupling.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("coupling has non-finite entries".into()));
        }
        check_symmetric(&noise_cov, "noise_cov")?;
        if noise_cov.clone().cholesky().is_none() {
            return Err(Error::InvalidInput("noise_cov is not positive definite".into()));
        }
        Ok(Self { channel_names, coupling, noise_cov })
    }

    /// Bivariate spec over channels `x`, `y`:
    /// `x_n = c_xx x_{n-1} + c_yx y_{n-1} + v_n`,
    /// `y_n = c_xy x_{n-1} + c_yy y_{n-1} + w_n`.
    pub fn bivariate(p: BivariateParams) -> Result<Self> {
        let coupling = DMatrix::from_row_slice(2, 2, &[p.c_xx, p.c_yx, p.c_xy, p.c_yy]);
        let noise = DMatrix::from_row_slice(
            2,
            2,
            &[p.sigma_v2, p.gamma_vw, p.gamma_vw, p.sigma_w2],
        );
        Self::new(vec!["x".into(), "y".into()], coupling, noise)
    }

    pub fn dimension(&self) -> usize {
        self.channel_names.len()
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.coupling
    }

    pub fn noise_cov(&self) -> &DMatrix<f64> {
        &self.noise_cov
    }

    /// Coefficient from channel `src` into channel `dst`.
    pub fn coupling_from(&self, src: usize, dst: usize) -> f64 {
        self.coupling[(dst, src)]
    }

    pub fn channel_index(&self, name: &str) -> Result<usize> {
        self.channel_names
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownChannel(name.to_string()))
    }

    pub fn spectral_radius(&self) -> f64 {
        self.coupling
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn check_stationary(&self) -> Result<()> {
        let radius = self.spectral_radius();
        if radius >= 1.0 - STATIONARITY_MARGIN {
            return Err(Error::NonStationary { radius });
        }
        Ok(())
    }

    /// Same process with channels reordered: new channel `k` is old `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let d = self.dimension();
        if perm.len() != d || (0..d).any(|i| !perm.contains(&i)) {
            return Err(Error::InvalidInput("not a permutation".into()));
        }
        let names = perm.iter().map(|&i| self.channel_names[i].clone()).collect();
        let c = DMatrix::from_fn(d, d, |r, s| self.coupling[(perm[r], perm[s])]);
        let w = DMatrix::from_fn(d, d, |r, s| self.noise_cov[(perm[r], perm[s])]);
        Self::new(names, c, w)
    }
}

/// Parameters of a bivariate AR(1) in source-to-target notation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateParams {
    pub c_xx: f64,
    pub c_yy: f64,
    /// From x into y.
    pub c_xy: f64,
    /// From y into x.
    pub c_yx: f64,
    pub sigma_v2: f64,
    pub sigma_w2: f64,
    pub gamma_vw: f64,
}

impl Default for BivariateParams {
    fn default() -> Self {
        Self {
            c_xx: 0.0,
            c_yy: 0.0,
            c_xy: 0.0,
            c_yx: 0.0,
            sigma_v2: 1.0,
            sigma_w2: 1.0,
            gamma_vw: 0.0,
        }
    }
}

/// Input to analyses that accept either a model specification or data.
#[derive(Debug, Clone, Copy)]
pub enum DataSource<'a> {
    Spec(&'a ARProcessSpec),
    Panel(&'a TimeSeriesPanel),
}

impl DataSource<'_> {
    pub fn channels(&self) -> &[String] {
        match self {
            DataSource::Spec(s) => s.channel_names(),
            DataSource::Panel(p) => p.channels(),
        }
    }
}

/// Where a joint model's covariance came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSource {
    Analytic,
    Supplied,
    /// Pooled sample covariance. Overlapping windows are dependent, so any
    /// standard errors derived from `windows` are approximate.
    Empirical { windows: usize, overlapping: bool },
}

/// One variable of a stacked window: a channel at a time index (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub channel: String,
    pub time: usize,
}

/// Zero-mean Gaussian over `horizon` consecutive samples of every channel.
///
/// Variables are laid out time-major: `(t - 1) * d + channel`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianJointModel {
    channels: Vec<String>,
    horizon: usize,
    cov: DMatrix<f64>,
    source: ModelSource,
}

impl GaussianJointModel {
    /// Validating constructor for arbitrary covariances.
    pub fn new(channels: Vec<String>, horizon: usize, cov: DMatrix<f64>) -> Result<Self> {
        check_unique(&channels)?;
        if horizon == 0 || channels.is_empty() {
            return Err(Error::InvalidInput("empty model".into()));
        }
        let dim = channels.len() * horizon;
        if cov.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "covariance is {:?}, expected {dim}x{dim}",
                cov.shape()
            )));
        }
        check_symmetric(&cov, "covariance")?;
        let min_eig = cov.clone().symmetric_eigenvalues().min();
        if min_eig < PSD_TOL {
            return Err(Error::InvalidInput(format!(
                "covariance is not positive semidefinite (eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self { channels, horizon, cov, source: ModelSource::Supplied })
    }

    /// Single-time model over named scalar variables.
    pub fn from_covariance(names: &[&str], cov: DMatrix<f64>) -> Result<Self> {
        Self::new(names.iter().map(|s| s.to_string()).collect(), 1, cov)
    }

    pub(crate) fn trusted(
        channels: Vec<String>,
        horizon: usize,
        cov: DMatrix<f64>,
        source: ModelSource,
    ) -> Self {
        debug_assert_eq!(cov.nrows(), channels.len() * horizon);
        Self { channels, horizon, cov, source }
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn dimension(&self) -> usize {
        self.channels.len()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn source(&self) -> ModelSource {
        self.source
    }

    pub fn variables(&self) -> Vec<Variable> {
        (1..=self.horizon)
            .flat_map(|t| {
                self.channels
                    .iter()
                    .map(move |c| Variable { channel: c.clone(), time: t })
            })
            .collect()
    }

    pub fn channel_index(&self, name: &str) -> Result<usize> {
        self.channels
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownChannel(name.to_string()))
    }

    /// Flat index of channel `ch` at 1-based time `t`.
    pub fn index(&self, ch: usize, t: usize) -> usize {
        (t - 1) * self.dimension() + ch
    }

    /// Model restricted to the first `horizon` time steps.
    pub fn leading(&self, horizon: usize) -> Result<Self> {
        if horizon == 0 || horizon > self.horizon {
            return Err(Error::InvalidInput(format!(
                "horizon {horizon} outside 1..={}",
                self.horizon
            )));
        }
        let k = horizon * self.dimension();
        Ok(Self {
            channels: self.channels.clone(),
            horizon,
            cov: self.cov.view((0, 0), (k, k)).into_owned(),
            source: self.source,
        })
    }
}

/// Time interval of a selector, 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeRange {
    Interval { start: usize, end: usize },
    /// `[1, k-1]`; empty when `k = 1`.
    Past(usize),
    /// `[k, k]`.
    Present(usize),
    /// `[1, k]`.
    UpTo(usize),
}

impl TimeRange {
    /// Resolve to `(start, end)`, `None` for the empty past.
    pub fn resolve(self, horizon: usize) -> Result<Option<(usize, usize)>> {
        let (a, b) = match self {
            TimeRange::Interval { start, end } => {
                if start == 0 || start > end {
                    return Err(Error::InvalidInput(format!(
                        "bad interval [{start}, {end}]"
                    )));
                }
                (start, end)
            }
            TimeRange::Past(k) => {
                if k == 0 {
                    return Err(Error::InvalidInput("PAST(0) is undefined".into()));
                }
                if k == 1 {
                    return Ok(None);
                }
                (1, k - 1)
            }
            TimeRange::Present(k) => (k, k),
            TimeRange::UpTo(k) => (1, k),
        };
        if a == 0 || b > horizon {
            return Err(Error::InvalidInput(format!(
                "range [{a}, {b}] outside model horizon {horizon}"
            )));
        }
        Ok(Some((a, b)))
    }
}

/// A channel restricted to a time range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSelector {
    pub channel: String,
    pub range: TimeRange,
}

impl VariableSelector {
    pub fn new(channel: impl Into<String>, range: TimeRange) -> Self {
        Self { channel: channel.into(), range }
    }

    pub fn interval(channel: impl Into<String>, start: usize, end: usize) -> Self {
        Self::new(channel, TimeRange::Interval { start, end })
    }

    pub fn past(channel: impl Into<String>, k: usize) -> Self {
        Self::new(channel, TimeRange::Past(k))
    }

    pub fn present(channel: impl Into<String>, k: usize) -> Self {
        Self::new(channel, TimeRange::Present(k))
    }

    pub fn up_to(channel: impl Into<String>, k: usize) -> Self {
        Self::new(channel, TimeRange::UpTo(k))
    }
}

/// How a side channel enters the `i`-th term of a summed measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditioningMode {
    /// Whole record `z^n`.
    Full,
    /// Up to the present, `z^i`.
    Causal,
    /// Strict past, `z^{i-1}` (the delayed series `Dz`).
    Delayed,
}

impl fmt::Display for ConditioningMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditioningMode::Full => "full",
            ConditioningMode::Causal => "causal",
            ConditioningMode::Delayed => "delayed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conditioner {
    pub channel: String,
    pub mode: ConditioningMode,
}

impl Conditioner {
    pub fn new(channel: impl Into<String>, mode: ConditioningMode) -> Self {
        Self { channel: channel.into(), mode }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MeasureKind {
    #[serde(rename = "MI")]
    MutualInformation,
    #[serde(rename = "DI")]
    DirectedInformation,
    #[serde(rename = "DI_causal_cond")]
    DirectedInformationCausalCond,
    /// Directed information from the delayed source, `I(Dx -> y)`.
    #[serde(rename = "DELAYED_DI")]
    DelayedDirectedInformation,
    #[serde(rename = "TE")]
    TransferEntropy,
    #[serde(rename = "IIE")]
    InstantaneousExchange,
    #[serde(rename = "GEWEKE_FWD")]
    GewekeForward,
    #[serde(rename = "GEWEKE_INST")]
    GewekeInstantaneous,
}

/// Finite horizon or per-sample limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    Steps(usize),
    Rate,
}

impl Serialize for Horizon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Horizon::Steps(n) => s.serialize_u64(*n as u64),
            Horizon::Rate => s.serialize_str("RATE"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Empirical,
    MonteCarlo,
}

/// A computed information measure in nats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub measure_kind: MeasureKind,
    pub value_nats: f64,
    pub horizon: Horizon,
    /// Largest horizon evaluated when `horizon` is a rate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon_reached: Option<usize>,
    pub source: String,
    pub target: String,
    pub conditioning: Vec<Conditioner>,
    pub method: Method,
}

/// Slack below zero tolerated before a value is treated as round-off.
pub const NEGATIVE_SLACK: f64 = 1e-9;

impl MeasureReport {
    pub(crate) fn new(
        kind: MeasureKind,
        raw: f64,
        horizon: Horizon,
        source: &str,
        target: &str,
        conditioning: &[Conditioner],
        method: Method,
    ) -> Self {
        debug_assert!(raw >= -NEGATIVE_SLACK * 10.0, "negative information {raw}");
        Self {
            measure_kind: kind,
            value_nats: raw.max(0.0),
            horizon,
            horizon_reached: None,
            source: source.to_string(),
            target: target.to_string(),
            conditioning: conditioning.to_vec(),
            method,
        }
    }

    pub fn value_bits(&self) -> f64 {
        self.value_nats / std::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditioningPolicy {
    Pairwise,
    CausallyConditioned,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicEdge {
    pub from: String,
    pub to: String,
    pub weight_nats: f64,
}

/// Undirected; `a < b` lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstantaneousEdge {
    pub a: String,
    pub b: String,
    pub weight_nats: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalGraph {
    pub nodes: Vec<String>,
    pub dynamic_edges: Vec<DynamicEdge>,
    pub instantaneous_edges: Vec<InstantaneousEdge>,
    pub conditioning_policy: ConditioningPolicy,
}

impl CausalGraph {
    pub fn new(nodes: Vec<String>, policy: ConditioningPolicy) -> Self {
        Self {
            nodes,
            dynamic_edges: Vec::new(),
            instantaneous_edges: Vec::new(),
            conditioning_policy: policy,
        }
    }

    pub fn add_dynamic(&mut self, from: &str, to: &str, weight_nats: f64) {
        debug_assert_ne!(from, to);
        self.dynamic_edges.push(DynamicEdge {
            from: from.into(),
            to: to.into(),
            weight_nats,
        });
        self.dynamic_edges
            .sort_by(|p, q| (&p.from, &p.to).cmp(&(&q.from, &q.to)));
    }

    pub fn add_instantaneous(&mut self, a: &str, b: &str, weight_nats: f64) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.instantaneous_edges.push(InstantaneousEdge {
            a: a.into(),
            b: b.into(),
            weight_nats,
        });
        self.instantaneous_edges
            .sort_by(|p, q| (&p.a, &p.b).cmp(&(&q.a, &q.b)));
    }

    /// Directed edge set as `(from, to)` name pairs, sorted.
    pub fn dynamic_pairs(&self) -> Vec<(String, String)> {
        self.dynamic_edges
            .iter()
            .map(|e| (e.from.clone(), e.to.clone()))
            .collect()
    }

    pub fn instantaneous_pairs(&self) -> Vec<(String, String)> {
        self.instantaneous_edges
            .iter()
            .map(|e| (e.a.clone(), e.b.clone()))
            .collect()
    }

    pub fn has_dynamic(&self, from: &str, to: &str) -> bool {
        self.dynamic_edges.iter().any(|e| e.from == from && e.to == to)
    }

    /// Same edges (ignoring weights) as `other`.
    pub fn same_edges(&self, other: &CausalGraph) -> bool {
        self.dynamic_pairs() == other.dynamic_pairs()
            && self.instantaneous_pairs() == other.instantaneous_pairs()
    }
}

/// Exact joint covariance of `(X_1, ..., X_n)` under stationary initialization.
///
/// `Cov(X_{t+h}, X_t) = C^h Γ_X`, built by repeated multiplication.
pub fn build_window_model(spec: &ARProcessSpec, horizon: usize) -> Result<GaussianJointModel> {
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    let gamma0 = solve_lyapunov(spec)?.gamma0;
    let d = spec.dimension();
    let c = spec.coupling();

    let mut lags = Vec::with_capacity(horizon);
    lags.push(gamma0);
    for h in 1..horizon {
        let next = c * &lags[h - 1];
        lags.push(next);
    }

    let dim = d * horizon;
    let mut cov = DMatrix::zeros(dim, dim);
    for s in 0..horizon {
        for t in 0..=s {
            let block = &lags[s - t];
            for i in 0..d {
                for j in 0..d {
                    cov[(s * d + i, t * d + j)] = block[(i, j)];
                    cov[(t * d + j, s * d + i)] = block[(i, j)];
                }
            }
        }
    }
    Ok(GaussianJointModel::trusted(
        spec.channel_names().to_vec(),
        horizon,
        cov,
        ModelSource::Analytic,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn iid_process_gives_identity() {
        let spec = ARProcessSpec::new(
            names(&["a", "b"]),
            DMatrix::zeros(2, 2),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let m = build_window_model(&spec, 3).unwrap();
        assert_eq!(m.cov(), &DMatrix::<f64>::identity(6, 6));
    }

    #[test]
    fn scalar_geometric_covariance() {
        let spec = ARProcessSpec::new(
            names(&["x"]),
            DMatrix::from_element(1, 1, 0.5),
            DMatrix::identity(1, 1),
        )
        .unwrap();
        let m = build_window_model(&spec, 2).unwrap();
        assert_relative_eq!(m.cov()[(0, 0)], 4.0 / 3.0, epsilon = 1e-13);
        assert_relative_eq!(m.cov()[(1, 1)], 4.0 / 3.0, epsilon = 1e-13);
        assert_relative_eq!(m.cov()[(0, 1)], 2.0 / 3.0, epsilon = 1e-13);
        assert_relative_eq!(m.cov()[(1, 0)], 2.0 / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn non_stationary_is_rejected() {
        let spec = ARProcessSpec::new(
            names(&["x"]),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::identity(1, 1),
        )
        .unwrap();
        assert!(matches!(
            build_window_model(&spec, 2),
            Err(Error::NonStationary { .. })
        ));
    }

    #[test]
    fn spec_validation() {
        let bad_shape = ARProcessSpec::new(
            names(&["x", "y"]),
            DMatrix::zeros(3, 3),
            DMatrix::identity(2, 2),
        );
        assert!(matches!(bad_shape, Err(Error::DimensionMismatch(_))));
        let asym = ARProcessSpec::new(
            names(&["x", "y"]),
            DMatrix::zeros(2, 2),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.2, 1.0]),
        );
        assert!(matches!(asym, Err(Error::InvalidInput(_))));
        let not_pd = ARProcessSpec::new(
            names(&["x", "y"]),
            DMatrix::zeros(2, 2),
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]),
        );
        assert!(not_pd.is_err());
        let dup = ARProcessSpec::new(
            names(&["x", "x"]),
            DMatrix::zeros(2, 2),
            DMatrix::identity(2, 2),
        );
        assert!(dup.is_err());
    }

    #[test]
    fn coupling_from_reads_source_first() {
        let spec = ARProcessSpec::bivariate(BivariateParams {
            c_xy: 0.7,
            c_yx: -0.2,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(spec.coupling_from(0, 1), 0.7);
        assert_eq!(spec.coupling_from(1, 0), -0.2);
    }

    #[test]
    fn panel_invariants() {
        assert!(TimeSeriesPanel::from_row_major(names(&["a", "b"]), vec![1.0, 2.0, 3.0]).is_err());
        assert!(
            TimeSeriesPanel::from_row_major(names(&["a", "b"]), vec![1.0, f64::NAN]).is_err()
        );
        assert!(TimeSeriesPanel::from_row_major(names(&["a", "a"]), vec![1.0, 2.0]).is_err());
        let p = TimeSeriesPanel::from_rows(names(&["a", "b"]), &[vec![1.0, 2.0], vec![3.0, 4.0]])
            .unwrap();
        assert_eq!(p.sample_count(), 2);
        assert_eq!(p.column(1), vec![2.0, 4.0]);
    }

    #[test]
    fn selectors_resolve() {
        assert_eq!(TimeRange::Past(1).resolve(5).unwrap(), None);
        assert_eq!(TimeRange::Past(4).resolve(5).unwrap(), Some((1, 3)));
        assert_eq!(TimeRange::Present(5).resolve(5).unwrap(), Some((5, 5)));
        assert_eq!(TimeRange::UpTo(2).resolve(5).unwrap(), Some((1, 2)));
        assert!(TimeRange::UpTo(6).resolve(5).is_err());
        assert!(TimeRange::Interval { start: 3, end: 2 }.resolve(5).is_err());
        assert!(TimeRange::Interval { start: 0, end: 2 }.resolve(5).is_err());
    }

    #[test]
    fn supplied_model_must_be_psd() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(GaussianJointModel::from_covariance(&["a", "b"], bad).is_err());
    }

    #[test]
    fn graph_canonicalizes_instantaneous_edges() {
        let mut g = CausalGraph::new(names(&["a", "b"]), ConditioningPolicy::Pairwise);
        g.add_instantaneous("b", "a", 0.1);
        assert_eq!(g.instantaneous_pairs(), vec![("a".to_string(), "b".to_string())]);
    }
}
