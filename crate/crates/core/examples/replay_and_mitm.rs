//! Threats beyond guessing: a recorded session replayed later, a relay that
//! lengthens the application-layer round trip, and a clone that copies the
//! physical pattern but does not know the application secret.
//!
//!     cargo run --example replay_and_mitm

use beaconveil::emitter::compile_schedule;
use beaconveil::sensor::{AppExchange, Sensor};
use beaconveil::sim::{fixtures, monte_carlo, play_session, Actor, Link, Scenario, ScenarioConfig};
use beaconveil::PatternId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(mut cfg: ScenarioConfig, actor: Actor) -> Result<(), Box<dyn std::error::Error>> {
    cfg.actor = actor;
    cfg.run.trials = 20;
    let name = cfg.actor.name();
    let m = monte_carlo(&Scenario::new(cfg)?, None)?.metrics;
    println!("{name:<8} {:?}", m.per_reason_counts);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut base = fixtures::fixtures().remove(0).1;
    base.sensor.app_secret = Some("1234567890".into());

    run(base.clone(), Actor::Legit { pattern_id: 0 })?;
    run(base.clone(), Actor::Replay { source_trial: 0, pattern_id: 0 })?;
    run(base.clone(), Actor::Mitm { extra_delay_s: 0.25, pattern_id: 0 })?;

    let scenario = Scenario::new(base)?;
    let c = &scenario.config;
    let pattern = scenario.store.get(PatternId(0)).expect("stored");
    let timeline = compile_schedule(pattern, &c.slots, &c.tx, 99)?;
    let link = Link { channel: &c.channel, trajectory: &c.trajectory };
    let guess = AppExchange { message: "0000000000".into(), rtt_s: c.run.base_rtt_s };
    let mut sensor = Sensor::new(&c.sensor);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let r = play_session(&timeline, 0.0, link, &c.sensor, &scenario.store, c.slots.tu_s, Some(guess), &mut sensor, &mut rng)?;
    println!("clone    phy_ok {} app_ok {:?} -> {}", r.phy_ok, r.app_ok, r.verdict.label());
    Ok(())
}
