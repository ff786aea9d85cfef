//! Legitimate sessions at fixed distances from 0.5 m to 40 m with 2 dB
//! shadowing, on the flyover's 50 Hz sensor. Reading the bits fails first
//! (past about 30 m the low level sinks under the floor), then beacons
//! stop arriving at all (about 40 m).
//!
//!     cargo run --release --example distance_sweep -- [trials]

use beaconveil::sim::{fixtures, sweep, sweep_csv, SweepAxis};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials: u64 = std::env::args().nth(1).map_or(Ok(500), |s| s.parse())?;
    let mut cfg = fixtures::flyover();
    cfg.run.trials = trials;
    let distances = [0.5, 5.0, 10.0, 20.0, 25.0, 28.0, 30.0, 32.0, 35.0, 38.0, 40.0, 42.0];
    let rows = sweep(&cfg, SweepAxis::Distance, &distances, None)?;
    print!("{}", sweep_csv(SweepAxis::Distance, &rows));
    for r in &rows {
        let top = r.metrics.per_reason_counts.iter().max_by_key(|(_, c)| **c).map(|(l, _)| l.as_str()).unwrap_or("-");
        println!("{:>5} m  FRR {:.3}  most common: {top}", r.value, r.metrics.frr);
    }
    Ok(())
}
