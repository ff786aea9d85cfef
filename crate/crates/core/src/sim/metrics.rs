//! Monte Carlo aggregation.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::Scenario;
use super::engine::{run_trial, SimError, TrialOutcome};

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
/// Returns `(0, 1)` when `n` is zero.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Two-sided 95 % normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub trials: u64,
    pub legit_trials: u64,
    pub adversarial_trials: u64,
    pub false_accepts: u64,
    pub false_rejects: u64,
    /// False accepts over adversarial trials; 0 when there were none.
    pub far: f64,
    pub far_ci95: (f64, f64),
    /// False rejects over legitimate trials; 0 when there were none.
    pub frr: f64,
    pub frr_ci95: (f64, f64),
    pub mean_session_s: f64,
    /// Verdict labels (`accepted`, `timeout`, `channel@1`, ...) and how often
    /// each occurred; the counts sum to `trials`.
    pub per_reason_counts: BTreeMap<String, u64>,
}

impl Metrics {
    pub fn from_outcomes(outcomes: &[TrialOutcome]) -> Self {
        let trials = outcomes.len() as u64;
        let legit_trials = outcomes.iter().filter(|o| o.legit).count() as u64;
        let adversarial_trials = trials - legit_trials;
        let false_accepts = outcomes.iter().filter(|o| o.false_accept()).count() as u64;
        let false_rejects = outcomes.iter().filter(|o| o.false_reject()).count() as u64;
        let rate = |k: u64, n: u64| if n == 0 { 0.0 } else { k as f64 / n as f64 };
        let mut per_reason_counts = BTreeMap::new();
        for o in outcomes {
            *per_reason_counts.entry(o.result.verdict.label()).or_insert(0) += 1;
        }
        let total_s: f64 = outcomes.iter().map(|o| o.result.duration_s()).sum();
        Self {
            trials,
            legit_trials,
            adversarial_trials,
            false_accepts,
            false_rejects,
            far: rate(false_accepts, adversarial_trials),
            far_ci95: wilson_interval(false_accepts, adversarial_trials, Z95),
            frr: rate(false_rejects, legit_trials),
            frr_ci95: wilson_interval(false_rejects, legit_trials, Z95),
            mean_session_s: if trials == 0 { 0.0 } else { total_s / trials as f64 },
            per_reason_counts,
        }
    }
}

/// Metrics plus every trial, in trial order.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub metrics: Metrics,
    pub outcomes: Vec<TrialOutcome>,
}

/// Runs `scenario.config.run.trials` trials on `threads` workers (`None`:
/// rayon's default). The output does not depend on the thread count.
pub fn monte_carlo(scenario: &Scenario, threads: Option<usize>) -> Result<RunOutput, SimError> {
    let trials = scenario.config.run.trials;
    let run = || (0..trials).into_par_iter().map(|i| run_trial(scenario, i)).collect::<Result<Vec<_>, _>>();
    let outcomes = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SimError::Threads(e.to_string()))?
            .install(run),
        None => run(),
    }?;
    Ok(RunOutput { metrics: Metrics::from_outcomes(&outcomes), outcomes })
}
