//! Deterministic Monte Carlo simulation of emitters, channel and sensor.

mod config;
mod engine;
pub mod fixtures;
mod metrics;
mod report;
mod sweep;

pub use config::{Actor, ConfigError, RunConfig, Scenario, ScenarioConfig, StoreConfig, SurveyEmitter};
pub use engine::{play_session, run_trial, trial_seed, Link, SimError, TrialOutcome};
pub use metrics::{monte_carlo, wilson_interval, Metrics, RunOutput, Z95};
pub use report::{Report, TrialRecord};
pub use sweep::{apply_axis, sweep, sweep_csv, SweepAxis, SweepError, SweepRow};
