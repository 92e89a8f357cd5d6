//! Causal graph inference from directed information rates.
//!
//! `x` is not a cause of `y` with respect to the side channels `z` when
//! `I_∞(Dx → y || Dz) = 0`, and not instantaneously coupled when
//! `I_∞(x → y || Dx, Dz) = 0`. Specs are tested against a numerical-zero
//! threshold; data are tested against a circular-shift surrogate null.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::measures::{
    empirical_geweke_value, measure_rate, GewekeConditioning, GewekeKind, RateOptions, TermKind,
};
use crate::model::{
    CausalGraph, Conditioner, ConditioningMode, ConditioningPolicy, DataSource, TimeSeriesPanel,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceOptions {
    /// Rates above this (nats) are edges on the analytic path.
    pub edge_threshold: f64,
    pub surrogate_count: usize,
    /// Significance level of the surrogate test.
    pub alpha: f64,
    /// Regression lag and minimum circular shift on the empirical path.
    pub lag: usize,
    pub seed: u64,
    pub rate: RateOptions,
}

impl Default for InferenceOptions {
    fn default() -> Self {
        Self {
            edge_threshold: 1e-7,
            surrogate_count: 99,
            alpha: 0.05,
            lag: 5,
            seed: 0,
            rate: RateOptions::default(),
        }
    }
}

/// Observed statistic and its surrogate distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateNull {
    pub observed: f64,
    /// Surrogate values in generation order.
    pub surrogates: Vec<f64>,
    /// Circular shift applied for each surrogate.
    pub offsets: Vec<usize>,
}

impl SurrogateNull {
    /// Empirical quantile: the `ceil(q S)`-th smallest surrogate.
    pub fn quantile(&self, q: f64) -> f64 {
        let mut s = self.surrogates.clone();
        s.sort_by(f64::total_cmp);
        let k = ((q * s.len() as f64).ceil() as usize).clamp(1, s.len());
        s[k - 1]
    }

    /// Rank p-value `(1 + #{s >= observed}) / (S + 1)`.
    pub fn p_value(&self) -> f64 {
        let ge = self.surrogates.iter().filter(|&&s| s >= self.observed).count();
        (1 + ge) as f64 / (self.surrogates.len() + 1) as f64
    }

    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_value() <= alpha
    }
}

fn rotate(series: &[f64], offset: usize) -> Vec<f64> {
    let n = series.len();
    (0..n).map(|t| series[(t + offset) % n]).collect()
}

/// Null distribution of a Geweke-type statistic under circular shifts of
/// the source channel `x` by offsets drawn uniformly from `[lag, n - lag]`.
#[allow(clippy::too_many_arguments)]
pub fn surrogate_null(
    panel: &TimeSeriesPanel,
    kind: GewekeKind,
    x: &str,
    y: &str,
    side: &[String],
    lag: usize,
    surrogate_count: usize,
    seed: u64,
) -> Result<SurrogateNull> {
    if surrogate_count < 19 {
        return Err(Error::InsufficientData(format!(
            "{surrogate_count} surrogates, need at least 19"
        )));
    }
    let n = panel.sample_count();
    let lag = lag.max(1);
    if n <= 2 * lag {
        return Err(Error::InsufficientData("panel too short for shifted surrogates".into()));
    }
    let mode = GewekeConditioning::Causal;
    let observed = empirical_geweke_value(panel, kind, x, y, side, mode, lag)?;
    let xi = panel.channel_index(x)?;
    let source = panel.column(xi);
    let results = exec::try_map_range(surrogate_count, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let offset = rng.random_range(lag..=n - lag);
        let shifted = panel.with_column(xi, &rotate(&source, offset));
        empirical_geweke_value(&shifted, kind, x, y, side, mode, lag).map(|v| (v, offset))
    })?;
    let (surrogates, offsets) = results.into_iter().unzip();
    Ok(SurrogateNull { observed, surrogates, offsets })
}

/// Stable per-pair seed so the result does not depend on channel order.
fn pair_seed(seed: u64, tag: &str, a: &str, b: &str) -> u64 {
    const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for byte in tag.bytes().chain([0]).chain(a.bytes()).chain([0]).chain(b.bytes()) {
        h ^= byte as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

enum Candidate {
    Dynamic(usize, usize),
    Instantaneous(usize, usize),
}

/// Directed graph of dynamic couplings plus undirected instantaneous couplings.
pub fn infer_graph(
    source: DataSource<'_>,
    policy: ConditioningPolicy,
    opts: &InferenceOptions,
) -> Result<CausalGraph> {
    let names = source.channels().to_vec();
    let d = names.len();
    if d < 2 {
        return Err(Error::InvalidInput("need at least two channels".into()));
    }
    if let DataSource::Spec(spec) = source {
        spec.check_stationary()?;
    }
    let mut candidates = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                candidates.push(Candidate::Dynamic(i, j));
            }
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            candidates.push(Candidate::Instantaneous(i, j));
        }
    }
    let side_of = |i: usize, j: usize| -> Vec<String> {
        match policy {
            ConditioningPolicy::Pairwise => Vec::new(),
            ConditioningPolicy::CausallyConditioned => (0..d)
                .filter(|&k| k != i && k != j)
                .map(|k| names[k].clone())
                .collect(),
        }
    };

    let decisions = exec::try_map_range(candidates.len(), |c| -> Result<Option<f64>> {
        let (i, j, term, kind, tag) = match candidates[c] {
            Candidate::Dynamic(i, j) => {
                (i, j, TermKind::DelayedDirectedInformation, GewekeKind::Forward, "fwd")
            }
            Candidate::Instantaneous(i, j) => {
                (i, j, TermKind::InstantaneousExchange, GewekeKind::Instantaneous, "inst")
            }
        };
        let side = side_of(i, j);
        match source {
            DataSource::Spec(spec) => {
                let cond: Vec<Conditioner> = side
                    .iter()
                    .map(|z| Conditioner::new(z.clone(), ConditioningMode::Delayed))
                    .collect();
                let v = measure_rate(spec, term, &names[i], &names[j], &cond, &opts.rate)?
                    .value_nats;
                Ok((v > opts.edge_threshold).then_some(v))
            }
            DataSource::Panel(panel) => {
                let null = surrogate_null(
                    panel,
                    kind,
                    &names[i],
                    &names[j],
                    &side,
                    opts.lag,
                    opts.surrogate_count,
                    pair_seed(opts.seed, tag, &names[i], &names[j]),
                )?;
                Ok(null.is_significant(opts.alpha).then_some(null.observed))
            }
        }
    })?;

    let mut graph = CausalGraph::new(names.clone(), policy);
    for (cand, decision) in candidates.iter().zip(decisions) {
        let Some(w) = decision else { continue };
        match *cand {
            Candidate::Dynamic(i, j) => graph.add_dynamic(&names[i], &names[j], w),
            Candidate::Instantaneous(i, j) => graph.add_instantaneous(&names[i], &names[j], w),
        }
    }
    Ok(graph)
}
