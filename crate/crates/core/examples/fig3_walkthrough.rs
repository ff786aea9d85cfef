//! The four-triplet example credential: parse it, compile the emitter
//! schedule, then play the genuine pattern and three one-field corruptions
//! to a noiseless sensor 5 m away.
//!
//!     cargo run --example fig3_walkthrough

use beaconveil::codec::parse_pattern;
use beaconveil::emitter::{compile_schedule, SlotConfig};
use beaconveil::radio::TxPowerLevels;
use beaconveil::sim::{fixtures, monte_carlo, Scenario};
use beaconveil::PatternId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pattern = parse_pattern(fixtures::FIG3_PATTERN, PatternId(0))?;
    println!("stored pattern: {pattern}");

    let timeline = compile_schedule(&pattern, &SlotConfig::default(), &TxPowerLevels::default(), 0)?;
    print!("{}", timeline.dump());
    println!();

    for (name, cfg) in fixtures::fixtures().into_iter().filter(|(n, _)| n.starts_with("fig3")) {
        let run = monte_carlo(&Scenario::new(cfg)?, None)?;
        let trial = &run.outcomes[0];
        let seen: Vec<String> = trial.result.transcript.iter().map(ToString::to_string).collect();
        println!("{name}: emitted {}", trial.emitted);
        println!("          observed {}", seen.join(" "));
        println!("          verdict  {} after {:.1} s", trial.result.verdict.label(), trial.result.duration_s());
    }
    Ok(())
}
