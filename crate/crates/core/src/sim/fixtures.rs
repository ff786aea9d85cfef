//! Built-in scenarios: the four-triplet walkthrough with its three corrupted
//! variants, the two-access-point survey and a noisy flyover.

use std::path::{Path, PathBuf};

use super::config::{Actor, ScenarioConfig, SurveyEmitter};
use crate::band::ChannelId;
use crate::emitter::Mutation;
use crate::radio::Trajectory;

/// The four-triplet example credential.
pub const FIG3_PATTERN: &str = "010@1:- 101@6:1 010@6:2 101@11:2";

/// The two surveyed access points and their time units.
pub const PROTO_EMITTERS: [(&str, f64); 2] = [("110@6:- 110@6:1", 10.0), ("101@1:- 101@1:1", 20.0)];

fn fig3(actor: Actor) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(vec![FIG3_PATTERN.into()], actor, Trajectory::fixed(5.0).expect("positive"));
    c.channel.sigma_db = 0.0;
    c.run.seed = 3;
    c
}

/// Length of the flyover pass, s.
pub const FLYOVER_PASS_S: f64 = 100.0;

/// The legitimate UAV on a straight 30 m -> 5 m -> 30 m pass with 2 dB
/// shadowing. The sensor polls at 50 Hz: at 5 Hz a slot holds three polls,
/// too few to read 6 dB steps through 2 dB noise.
pub fn flyover() -> ScenarioConfig {
    let pass = Trajectory::flyover(30.0, 5.0, FLYOVER_PASS_S).expect("valid pass");
    let mut c = ScenarioConfig::new(vec![FIG3_PATTERN.into()], Actor::Legit { pattern_id: 0 }, pass);
    c.channel.sigma_db = 2.0;
    c.sensor.f_s = 50.0;
    c.run.seed = 2024;
    c.run.trials = 10_000;
    c
}

/// `(file name, scenario)` for every built-in fixture.
pub fn fixtures() -> Vec<(&'static str, ScenarioConfig)> {
    let mutant = |mutation| fig3(Actor::Mutant { pattern_id: 0, mutation });
    let mut proto = ScenarioConfig::new(
        PROTO_EMITTERS.iter().map(|(p, _)| p.to_string()).collect(),
        Actor::Survey {
            emitters: PROTO_EMITTERS.iter().map(|(p, tu)| SurveyEmitter { pattern: p.to_string(), tu_s: *tu }).collect(),
        },
        Trajectory::fixed(3.0).expect("positive"),
    );
    proto.run.seed = 7;
    proto.run.trials = 2;
    vec![
        ("fig3a.scn", fig3(Actor::Legit { pattern_id: 0 })),
        ("fig3b.scn", mutant(Mutation::FlipTxBit { triplet: 1, bit: 0 })),
        ("fig3c.scn", mutant(Mutation::WrongChannel { triplet: 1, channel: ChannelId::new(9).expect("nonzero") })),
        ("fig3d.scn", mutant(Mutation::WrongInterval { triplet: 2, tu: 1 })),
        ("proto.scn", proto),
        ("flyover.scn", flyover()),
    ]
}

/// Writes every fixture into `dir` and returns the paths.
pub fn write_fixtures(dir: impl AsRef<Path>) -> std::io::Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    fixtures()
        .into_iter()
        .map(|(name, cfg)| {
            let path = dir.join(name);
            std::fs::write(&path, cfg.to_toml_string())?;
            Ok(path)
        })
        .collect()
}
