//! One-parameter sweeps. Every row reuses the scenario seed, so rows differ
//! only in the swept value.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{Actor, ConfigError, Scenario, ScenarioConfig};
use super::engine::SimError;
use super::metrics::{monte_carlo, Metrics};
use crate::codec::render_pattern;
use crate::emitter::{mix64, random_pattern};
use crate::radio::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "distance")]
    Distance,
    #[serde(rename = "sigma_db")]
    SigmaDb,
    #[serde(rename = "n")]
    N,
    #[serde(rename = "L")]
    L,
    #[serde(rename = "eps_tu")]
    EpsTu,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [SweepAxis::Distance, SweepAxis::SigmaDb, SweepAxis::N, SweepAxis::L, SweepAxis::EpsTu];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Distance => "distance",
            SweepAxis::SigmaDb => "sigma_db",
            SweepAxis::N => "n",
            SweepAxis::L => "L",
            SweepAxis::EpsTu => "eps_tu",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown sweep axis {s:?}; expected one of distance, sigma_db, n, L, eps_tu"))
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{axis} = {value}: {source}")]
    Config {
        axis: SweepAxis,
        value: f64,
        #[source]
        source: ConfigError,
    },
    #[error("{axis} = {value}: {reason}")]
    BadValue { axis: SweepAxis, value: f64, reason: String },
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub metrics: Metrics,
}

fn whole(axis: SweepAxis, value: f64) -> Result<usize, SweepError> {
    if value >= 0.0 && value.fract() == 0.0 && value <= 1e6 {
        Ok(value as usize)
    } else {
        Err(SweepError::BadValue { axis, value, reason: "must be a whole number".into() })
    }
}

/// The scenario with `axis` set to `value`.
///
/// Changing `n` or `L` redraws every stored pattern uniformly at that size
/// from a stream keyed by the scenario seed, and resizes a brute-force actor
/// to match. Actors tied to a particular pattern layout (mutants, surveys)
/// cannot be swept over `n` or `L`.
pub fn apply_axis(template: &ScenarioConfig, axis: SweepAxis, value: f64) -> Result<ScenarioConfig, SweepError> {
    let mut c = template.clone();
    match axis {
        SweepAxis::Distance => {
            c.trajectory = Trajectory::fixed(value)
                .map_err(|e| SweepError::Config { axis, value, source: e.into() })?;
        }
        SweepAxis::SigmaDb => c.channel.sigma_db = value,
        SweepAxis::EpsTu => c.sensor.eps_tu = value,
        SweepAxis::N | SweepAxis::L => {
            let size = whole(axis, value)?;
            let stored = c.parse_store().map_err(|source| SweepError::Config { axis, value, source })?;
            let mut n = c.sensor.n;
            let mut l = stored.first().map_or(2, |p| p.len());
            if axis == SweepAxis::N {
                n = size;
            } else {
                l = size;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(mix64(c.run.seed ^ 0x5EED_5707_0000_0000));
            c.store.patterns = (0..stored.len().max(1))
                .map(|_| random_pattern(&mut rng, n, l, &c.band, c.store.max_tu).map(|p| render_pattern(&p)))
                .collect::<Result<_, _>>()
                .map_err(|e| SweepError::Config { axis, value, source: e.into() })?;
            c.sensor.n = n;
            match &mut c.actor {
                Actor::BruteForce { n: bn, l: bl } => {
                    *bn = n;
                    *bl = l;
                }
                Actor::Legit { .. } | Actor::Replay { .. } | Actor::Mitm { .. } => {}
                other => {
                    return Err(SweepError::BadValue {
                        axis,
                        value,
                        reason: format!("a {} actor cannot be resized", other.name()),
                    })
                }
            }
        }
    }
    Ok(c)
}

pub fn sweep(
    template: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
    threads: Option<usize>,
) -> Result<Vec<SweepRow>, SweepError> {
    values
        .iter()
        .map(|&value| {
            let cfg = apply_axis(template, axis, value)?;
            let scenario = Scenario::new(cfg).map_err(|source| SweepError::Config { axis, value, source })?;
            let run = monte_carlo(&scenario, threads)?;
            Ok(SweepRow { value, metrics: run.metrics })
        })
        .collect()
}

/// `axis,value,trials,far,far_lo,far_hi,frr,frr_lo,frr_hi,mean_session_s`
pub fn sweep_csv(axis: SweepAxis, rows: &[SweepRow]) -> String {
    let mut out = String::from("axis,value,trials,far,far_lo,far_hi,frr,frr_lo,frr_hi,mean_session_s\n");
    for r in rows {
        let m = &r.metrics;
        out.push_str(&format!(
            "{axis},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            r.value, m.trials, m.far, m.far_ci95.0, m.far_ci95.1, m.frr, m.frr_ci95.0, m.frr_ci95.1, m.mean_session_s
        ));
    }
    out
}
