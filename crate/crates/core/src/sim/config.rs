//! Scenario files.
//!
//! A scenario is a TOML document with the sections `[band]`, `[channel]`,
//! `[tx]`, `[slots]`, `[sensor]`, `[store]`, `[actor]`, `[trajectory]` and
//! `[run]`. Stored patterns are written inline in the pattern grammar of
//! [`crate::codec`] and get ids 0, 1, 2, ... in list order.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::band::BandPlan;
use crate::codec::{parse_pattern, CodecError};
use crate::emitter::{mutate, EmitterError, Mutation, SlotConfig};
use crate::matcher::PatternStore;
use crate::pattern::{PatternId, SecretPattern, ValidationError, DEFAULT_MAX_TU};
use crate::radio::{ChannelParams, RadioError, Trajectory, TxPowerLevels};
use crate::sensor::{SensorConfig, SensorConfigError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: file not found")]
    NotFound { path: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario syntax: {0}")]
    Syntax(String),
    #[error("store pattern {index}: {source}")]
    Pattern {
        index: usize,
        #[source]
        source: CodecError,
    },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error(transparent)]
    Emitter(#[from] EmitterError),
    #[error(transparent)]
    Sensor(#[from] SensorConfigError),
    #[error("inconsistent scenario: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoreConfig {
    #[serde(default = "default_max_tu")]
    pub max_tu: u32,
    pub patterns: Vec<String>,
}

fn default_max_tu() -> u32 {
    DEFAULT_MAX_TU
}

/// One access point surveyed by the sensor, with its own time unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveyEmitter {
    pub pattern: String,
    pub tu_s: f64,
}

/// Who is emitting in a trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Actor {
    /// The legitimate UAV sending stored pattern `pattern_id`.
    Legit { pattern_id: u32 },
    /// A stored pattern with one field corrupted.
    Mutant { pattern_id: u32, mutation: Mutation },
    /// A fresh uniform guess over the whole `n`-bit, `L`-triplet space per trial.
    BruteForce {
        n: usize,
        #[serde(rename = "L")]
        l: usize,
    },
    /// Re-transmits what the legitimate UAV sent in trial `source_trial`,
    /// after the sensor has heard the original.
    Replay {
        source_trial: u64,
        #[serde(default)]
        pattern_id: u32,
    },
    /// Relays the legitimate UAV, adding `extra_delay_s` to the round trip.
    Mitm {
        extra_delay_s: f64,
        #[serde(default)]
        pattern_id: u32,
    },
    /// Trial `i` listens to emitter `i mod len`; transcripts keep raw gaps.
    Survey { emitters: Vec<SurveyEmitter> },
}

impl Actor {
    pub fn name(&self) -> &'static str {
        match self {
            Actor::Legit { .. } => "legit",
            Actor::Mutant { .. } => "mutant",
            Actor::BruteForce { .. } => "brute_force",
            Actor::Replay { .. } => "replay",
            Actor::Mitm { .. } => "mitm",
            Actor::Survey { .. } => "survey",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Round trip of the app-layer exchange without a relay.
    #[serde(default = "default_base_rtt")]
    pub base_rtt_s: f64,
}

fn default_trials() -> u64 {
    1
}

fn default_base_rtt() -> f64 {
    0.02
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: 0, trials: default_trials(), base_rtt_s: default_base_rtt() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub band: BandPlan,
    #[serde(default)]
    pub channel: ChannelParams,
    #[serde(default)]
    pub tx: TxPowerLevels,
    #[serde(default)]
    pub slots: SlotConfig,
    #[serde(default)]
    pub sensor: SensorConfig,
    pub store: StoreConfig,
    pub actor: Actor,
    pub trajectory: Trajectory,
    #[serde(default)]
    pub run: RunConfig,
}

impl ScenarioConfig {
    /// A scenario with library defaults everywhere except the given parts.
    pub fn new(patterns: Vec<String>, actor: Actor, trajectory: Trajectory) -> Self {
        Self {
            band: BandPlan::default(),
            channel: ChannelParams::default(),
            tx: TxPowerLevels::default(),
            slots: SlotConfig::default(),
            sensor: SensorConfig::default(),
            store: StoreConfig { max_tu: DEFAULT_MAX_TU, patterns },
            actor,
            trajectory,
            run: RunConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serialises")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| {
            let path = path.display().to_string();
            if source.kind() == std::io::ErrorKind::NotFound {
                ConfigError::NotFound { path }
            } else {
                ConfigError::Io { path, source }
            }
        })?;
        Self::from_toml_str(&text)
    }

    pub fn parse_store(&self) -> Result<Vec<SecretPattern>, ConfigError> {
        self.store
            .patterns
            .iter()
            .enumerate()
            .map(|(index, line)| {
                parse_pattern(line, PatternId(index as u32)).map_err(|source| ConfigError::Pattern { index, source })
            })
            .collect()
    }
}

/// A checked scenario ready to run.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub store: PatternStore,
    pub survey: Vec<(SecretPattern, f64)>,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self, ConfigError> {
        let c = &config;
        c.channel.validate()?;
        c.tx.validate()?;
        c.slots.validate()?;
        c.sensor.validate()?;
        c.sensor.check_profile(c.slots.slot_s)?;
        if c.run.trials == 0 {
            return Err(ConfigError::Inconsistent("run.trials must be at least 1".into()));
        }
        if !(c.run.base_rtt_s >= 0.0) {
            return Err(ConfigError::Inconsistent("run.base_rtt_s must be non-negative".into()));
        }
        if c.store.max_tu == 0 {
            return Err(ConfigError::Inconsistent("store.max_tu must be at least 1".into()));
        }
        let patterns = c.parse_store()?;
        if patterns.is_empty() {
            return Err(ConfigError::Inconsistent("store holds no pattern".into()));
        }
        let store = PatternStore::new(patterns, &c.band, c.store.max_tu)?;
        let watchdog = c.sensor.watchdog_for(c.slots.tu_s, store.longest_gap_tu());
        for p in store.iter() {
            if p.width() != c.sensor.n {
                return Err(ConfigError::Inconsistent(format!(
                    "pattern {} has {} bits per triplet but sensor.n = {}",
                    p.id,
                    p.width(),
                    c.sensor.n
                )));
            }
            c.slots.check_fit(p)?;
            let longest = p.triplets.iter().filter_map(|t| t.interval_tu).max().unwrap_or(1);
            if f64::from(longest) * c.slots.tu_s >= watchdog {
                return Err(ConfigError::Inconsistent(format!(
                    "pattern {} has a {longest} TU gap, longer than the {watchdog} s watchdog",
                    p.id
                )));
            }
        }

        let known = |id: u32| {
            store
                .get(PatternId(id))
                .ok_or_else(|| ConfigError::Inconsistent(format!("actor references unknown pattern {id}")))
        };
        let mut survey = Vec::new();
        match &c.actor {
            Actor::Legit { pattern_id } | Actor::Replay { pattern_id, .. } => {
                known(*pattern_id)?;
            }
            Actor::Mitm { pattern_id, extra_delay_s } => {
                known(*pattern_id)?;
                if !(*extra_delay_s >= 0.0) {
                    return Err(ConfigError::Inconsistent("extra_delay_s must be non-negative".into()));
                }
            }
            Actor::Mutant { pattern_id, mutation } => {
                let mutated = mutate(known(*pattern_id)?, *mutation)?;
                c.slots.check_fit(&mutated)?;
            }
            Actor::BruteForce { n, l } => {
                if *n != c.sensor.n {
                    return Err(ConfigError::Inconsistent(format!(
                        "brute force guesses {n}-bit patterns but sensor.n = {}",
                        c.sensor.n
                    )));
                }
                if *l < 2 {
                    return Err(ValidationError::BadLength { len: *l }.into());
                }
                if c.slots.burst_s(*n) > c.slots.tu_s + 1e-9 {
                    return Err(ConfigError::Inconsistent("brute-force bursts do not fit one TU".into()));
                }
            }
            Actor::Survey { emitters } => {
                if emitters.is_empty() {
                    return Err(ConfigError::Inconsistent("survey lists no emitter".into()));
                }
                for (index, e) in emitters.iter().enumerate() {
                    let p = parse_pattern(&e.pattern, PatternId(u32::MAX - index as u32))
                        .map_err(|source| ConfigError::Pattern { index, source })?;
                    let slots = SlotConfig { tu_s: e.tu_s, ..c.slots };
                    slots.check_fit(&p)?;
                    survey.push((p, e.tu_s));
                }
            }
        }
        Ok(Self { config, store, survey })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG3: &str = "010@1:- 101@6:1 010@6:2 101@11:2";

    fn base(actor: Actor) -> ScenarioConfig {
        ScenarioConfig::new(vec![FIG3.into()], actor, Trajectory::fixed(5.0).unwrap())
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = base(Actor::Mutant {
            pattern_id: 0,
            mutation: Mutation::WrongInterval { triplet: 2, tu: 1 },
        });
        cfg.sensor.app_secret = Some("1234567890".into());
        let text = cfg.to_toml_string();
        for section in ["[band]", "[channel]", "[tx]", "[slots]", "[sensor]", "[store]", "[actor]", "[trajectory]", "[run]"] {
            assert!(text.contains(section), "missing {section} in\n{text}");
        }
        assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn hand_written_scenario() {
        let text = r#"
[band]
name = "wifi"
channel_count = 14
base_freq = 2412.0
spacing = 5.0

[store]
patterns = ["010@1:- 101@6:1 010@6:2 101@11:2"]

[actor]
kind = "brute_force"
n = 3
L = 4

[trajectory]
waypoints = [[0.0, 30.0], [10.0, 5.0], [20.0, 30.0]]

[run]
seed = 42
trials = 10
"#;
        let cfg = ScenarioConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.actor, Actor::BruteForce { n: 3, l: 4 });
        assert_eq!(cfg.run.seed, 42);
        assert_eq!(cfg.sensor, SensorConfig::default());
        Scenario::new(cfg).unwrap();
    }

    #[test]
    fn unknown_keys_are_errors() {
        let text = "[store]\npatterns = []\nbogus = 1\n[actor]\nkind = \"legit\"\npattern_id = 0\n[trajectory]\nwaypoints = [[0.0, 1.0]]\n";
        assert!(matches!(ScenarioConfig::from_toml_str(text), Err(ConfigError::Syntax(_))));
    }

    #[test]
    fn inconsistencies_are_caught_before_running() {
        assert!(Scenario::new(base(Actor::Legit { pattern_id: 3 })).is_err());

        let mut narrow = base(Actor::Legit { pattern_id: 0 });
        narrow.slots.tu_s = 1.0;
        assert!(matches!(Scenario::new(narrow), Err(ConfigError::Emitter(EmitterError::Fit { .. }))));

        let mut sparse = base(Actor::Legit { pattern_id: 0 });
        sparse.slots.slot_s = 0.3;
        assert!(matches!(Scenario::new(sparse), Err(ConfigError::Sensor(_))));

        let mut wrong_n = base(Actor::Legit { pattern_id: 0 });
        wrong_n.sensor.n = 4;
        assert!(Scenario::new(wrong_n).is_err());

        let mut bad_pattern = base(Actor::Legit { pattern_id: 0 });
        bad_pattern.store.patterns.push("000@1:- 101@2:1".into());
        assert!(matches!(Scenario::new(bad_pattern), Err(ConfigError::Pattern { index: 1, .. })));

        let mut zero = base(Actor::Legit { pattern_id: 0 });
        zero.run.trials = 0;
        assert!(Scenario::new(zero).is_err());

        let mut long_gap = base(Actor::Legit { pattern_id: 0 });
        long_gap.sensor.watchdog_s = Some(30.0);
        long_gap.store.patterns = vec!["010@1:- 101@6:1 010@6:9".into()];
        assert!(Scenario::new(long_gap).is_err());
    }

    #[test]
    fn missing_file_is_reported_as_such() {
        let err = ScenarioConfig::load("/nonexistent/missing.scn").unwrap_err();
        assert!(err.to_string().contains("file not found"));
    }
}
