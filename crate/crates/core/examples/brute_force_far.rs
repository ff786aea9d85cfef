//! Impersonation by guessing. First every candidate of a tiny space
//! (2 bits, 2 triplets, 2 channels) is played to the sensor, then a random
//! guesser is run for many trials and its false-accept rate compared with
//! one over the space size.
//!
//!     cargo run --release --example brute_force_far -- [trials]

use beaconveil::band::{BandPlan, ChannelId};
use beaconveil::emitter::compile_triplets;
use beaconveil::pattern::{SecretPattern, Triplet, TxPattern};
use beaconveil::radio::Trajectory;
use beaconveil::sensor::Sensor;
use beaconveil::sim::{monte_carlo, play_session, Actor, Link, Scenario, ScenarioConfig};
use beaconveil::space::pattern_space_size;
use beaconveil::PatternId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials: u64 = std::env::args().nth(1).map_or(Ok(20_000), |s| s.parse())?;

    let mut cfg = ScenarioConfig::new(
        vec!["01@1:- 10@2:1".into()],
        Actor::BruteForce { n: 2, l: 2 },
        Trajectory::fixed(5.0)?,
    );
    cfg.band = BandPlan::new("two-channel", 2, 2412.0, 5.0)?;
    cfg.channel.sigma_db = 0.0;
    cfg.sensor.n = 2;
    cfg.store.max_tu = 2;
    cfg.run.trials = trials;
    cfg.run.seed = 64;
    let scenario = Scenario::new(cfg)?;
    let c = &scenario.config;
    let space = pattern_space_size(2, 2, 2, 2)?;
    println!("space size {space}");

    let mut accepted = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for bits0 in 0..4 {
        for bits1 in 0..4 {
            for ch0 in 1..=2 {
                for ch1 in 1..=2 {
                    let t = |bits, ch, interval| Triplet::new(TxPattern::new(bits, 2).unwrap(), ChannelId::new(ch).unwrap(), interval);
                    let candidate = SecretPattern::new(PatternId(0), vec![t(bits0, ch0, None), t(bits1, ch1, Some(1))]);
                    let tl = compile_triplets(&candidate, &c.slots, &c.tx, (bits0 * 64 + bits1 * 4) + u64::from(ch0 * 2 + ch1))?;
                    let link = Link { channel: &c.channel, trajectory: &c.trajectory };
                    let mut sensor = Sensor::new(&c.sensor);
                    let r = play_session(&tl, 0.0, link, &c.sensor, &scenario.store, c.slots.tu_s, None, &mut sensor, &mut rng)?;
                    if r.verdict.is_accepted() {
                        accepted.push(candidate.to_string());
                    }
                }
            }
        }
    }
    println!("exhaustive: {} of 64 candidates accepted: {accepted:?}", accepted.len());

    let m = monte_carlo(&scenario, None)?.metrics;
    println!(
        "random guessing: FAR {:.5} (95% CI {:.5}..{:.5}) vs 1/64 = {:.5} over {} trials",
        m.far, m.far_ci95.0, m.far_ci95.1, 1.0 / 64.0, m.trials
    );
    Ok(())
}
