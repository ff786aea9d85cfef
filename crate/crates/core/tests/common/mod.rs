//! Test-side oracles and fixtures, written independently of the library's
//! own generators.

#![allow(dead_code)]

use beaconveil::band::{BandPlan, ChannelId};
use beaconveil::emitter::compile_triplets;
use beaconveil::matcher::PatternStore;
use beaconveil::pattern::{SecretPattern, Triplet, TxPattern};
use beaconveil::radio::Trajectory;
use beaconveil::sensor::{AuthResult, Sensor};
use beaconveil::sim::{play_session, Actor, Link, Scenario, ScenarioConfig};
use beaconveil::PatternId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every candidate of the brute-force space, all-equal bit patterns
/// included, by counting through a mixed-radix index.
pub fn all_candidates(n: usize, l: usize, channels: u16, max_tu: u32) -> Vec<SecretPattern> {
    let bit_values = 1u64 << n;
    let mut radices = Vec::new();
    for i in 0..l {
        radices.push(bit_values);
        radices.push(u64::from(channels));
        if i >= 2 {
            radices.push(u64::from(max_tu));
        }
    }
    let total: u64 = radices.iter().product();
    (0..total)
        .map(|mut index| {
            let mut digits = Vec::with_capacity(radices.len());
            for r in &radices {
                digits.push(index % r);
                index /= r;
            }
            let mut d = digits.into_iter();
            let triplets = (0..l)
                .map(|i| {
                    let bits = d.next().unwrap();
                    let channel = d.next().unwrap() as u16 + 1;
                    let interval_tu = match i {
                        0 => None,
                        1 => Some(1),
                        _ => Some(d.next().unwrap() as u32 + 1),
                    };
                    Triplet::new(TxPattern::new(bits, n).unwrap(), ChannelId::new(channel).unwrap(), interval_tu)
                })
                .collect();
            SecretPattern::new(PatternId(u32::MAX), triplets)
        })
        .collect()
}

/// `2^(nL) · channels^L · max_tu^(L-2)` in plain integer arithmetic.
pub fn space_size(n: u32, l: u32, channels: u128, max_tu: u128) -> u128 {
    2u128.pow(n * l) * channels.pow(l) * max_tu.pow(l - 2)
}

pub fn band(channels: u16) -> BandPlan {
    BandPlan::new("test", channels, 2412.0, 5.0).unwrap()
}

/// A noiseless close-range scenario over a small band.
pub fn small_scenario(stored: &str, n: usize, channels: u16, max_tu: u32, actor: Actor) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(vec![stored.into()], actor, Trajectory::fixed(5.0).unwrap());
    c.band = band(channels);
    c.channel.sigma_db = 0.0;
    c.sensor.n = n;
    c.store.max_tu = max_tu;
    c
}

/// Plays one arbitrary candidate to a fresh sensor of `scenario`.
pub fn play(scenario: &Scenario, candidate: &SecretPattern, seed: u64) -> AuthResult {
    play_with_store(scenario, &scenario.store, candidate, seed)
}

pub fn play_with_store(scenario: &Scenario, store: &PatternStore, candidate: &SecretPattern, seed: u64) -> AuthResult {
    let c = &scenario.config;
    let tl = compile_triplets(candidate, &c.slots, &c.tx, seed).unwrap();
    let link = Link { channel: &c.channel, trajectory: &c.trajectory };
    let mut sensor = Sensor::new(&c.sensor);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    play_session(&tl, 0.0, link, &c.sensor, store, c.slots.tu_s, None, &mut sensor, &mut rng).unwrap()
}
