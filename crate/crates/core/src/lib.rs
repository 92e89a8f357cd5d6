//! Directed information, transfer entropy, instantaneous information exchange
//! and Geweke causality indices for multivariate Gaussian time series.
//!
//! Measures are evaluated exactly on the joint covariance of a stacked window
//! of samples ([`GaussianJointModel`]), which comes either from an AR(1)
//! specification ([`build_window_model`]) or from data
//! ([`simulate::estimate_window_covariance`]). All values are in nats.

pub mod analytic;
pub mod error;
pub mod exec;
pub mod gaussian;
pub mod inference;
pub mod measures;
pub mod model;
pub mod presets;
mod regression;
pub mod simulate;

pub use analytic::{
    bivariate_closed_forms, bivariate_marginal_forms, bivariate_rates, solve_lyapunov,
    trivariate_case_rates, BivariateMeasures, BivariateRates, CaseRates, StationaryMoments,
    TrivariateCase, TrivariateRoles,
};
pub use error::{Error, Result};
pub use gaussian::{conditional_mutual_information, gaussian_entropy, prediction_error, PredictionError};
pub use inference::{infer_graph, surrogate_null, InferenceOptions, SurrogateNull};
pub use measures::{
    delayed_directed_information, directed_information, geweke_index, geweke_index_empirical,
    instantaneous_information_exchange, measure_rate, mutual_information_block, rate_term,
    transfer_entropy, GewekeConditioning, GewekeKind, RateOptions, TermKind,
};
pub use model::{
    build_window_model, ARProcessSpec, BivariateParams, CausalGraph, Conditioner,
    ConditioningMode, ConditioningPolicy, DataSource, GaussianJointModel, Horizon, MeasureKind,
    MeasureReport, Method, TimeRange, TimeSeriesPanel, VariableSelector,
};
pub use simulate::{estimate_window_covariance, simulate, simulate_ensemble, SimulationConfig};
