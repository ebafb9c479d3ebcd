//! Life-cycle simulation: products with embedded expectation agents placed
//! in stochastic environments.

pub mod adjust;
pub mod agent;
pub mod cluster;
pub mod engine;
pub mod layers;
pub mod scenario;
pub mod signal;
pub mod synthetic;
pub mod trace;

pub use adjust::adjust_configuration;
pub use agent::{ExpectationAgent, Violation};
pub use cluster::{cluster_agents, group_families, ClusterError, Clustering, Families};
pub use engine::{run, SimError};
pub use layers::{layer_variability, LayerVariability};
pub use scenario::{
    validate_scenario, AgentSpec, EnvironmentProfile, EventKind, Expectation, ProductSpec, Scenario,
    DEFAULT_TAU, DEFAULT_WINDOW,
};
pub use signal::{
    coefficient_of_variation, detect_distinction, ols_slope, preprocess_filter, trend_of_series,
    SignalError, Trend, Verdict,
};
pub use trace::{
    interaction_trend, parse_jsonl, to_jsonl_string, write_jsonl, write_summary_csv, SimTrace,
    TraceError,
};
