//! Survey of two access points with different time units. The sensor logs
//! each raw triplet with the gap it measured in seconds; both reduce to the
//! same relative pattern shape once divided by their own first gap.
//!
//!     cargo run --example prototype_triplets

use beaconveil::sim::{fixtures, monte_carlo, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = fixtures::fixtures().into_iter().find(|(n, _)| *n == "proto.scn").expect("fixture").1;
    let run = monte_carlo(&Scenario::new(cfg)?, None)?;
    for o in &run.outcomes {
        println!("emitter {} ({})", o.trial, o.emitted);
        for r in &o.result.raw_transcript {
            let gap = r.raw_interval_s.map_or("-".to_string(), |s| format!("{s:.1} s"));
            println!("  ({}, {}, {gap})", r.tx_pattern, r.channel);
        }
        println!("  verdict {}", o.result.verdict.label());
    }
    Ok(())
}
