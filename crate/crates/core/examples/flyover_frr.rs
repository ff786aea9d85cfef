//! False-reject rate of the legitimate UAV on a noisy 30 m -> 5 m -> 30 m
//! pass, at the fixture's 50 Hz poll rate and at the 5 Hz prototype rate.
//!
//!     cargo run --release --example flyover_frr -- [trials]

use beaconveil::sim::{fixtures, monte_carlo, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials: u64 = std::env::args().nth(1).map_or(Ok(2000), |s| s.parse())?;

    for f_s in [50.0, 5.0] {
        let mut cfg = fixtures::flyover();
        cfg.sensor.f_s = f_s;
        cfg.run.trials = trials;
        let m = monte_carlo(&Scenario::new(cfg)?, None)?.metrics;
        println!(
            "{f_s:>4} Hz: FRR {:.4} (95% CI {:.4}..{:.4}), mean session {:.1} s",
            m.frr, m.frr_ci95.0, m.frr_ci95.1, m.mean_session_s
        );
        for (label, count) in &m.per_reason_counts {
            println!("        {label:<16} {count}");
        }
    }
    Ok(())
}
