//! Discrete-event playback of emission timelines to a sensor.
//!
//! Time is kept in integer microseconds. The sensor polls on a grid
//! `phase + j / f_s` with a random phase per session; a detected beacon is
//! stamped with the first poll instant at or after its emission, so measured
//! gaps carry up to one sample period of quantisation. Emitter events sort
//! before sensor events at equal times.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::config::{Actor, Scenario};
use crate::codec::render_pattern;
use crate::emitter::{
    brute_force_candidate, compile_schedule, compile_triplets, mix64, mutate, replay_timeline, EmissionTimeline,
    EmitterError,
};
use crate::matcher::PatternStore;
use crate::pattern::PatternId;
use crate::radio::{received_power, ChannelParams, RadioError, Trajectory};
use crate::sensor::{AppExchange, AuthResult, BeaconObservation, ObservedSample, Sensor, SensorConfig, Session};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Emitter(#[from] EmitterError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error("thread pool: {0}")]
    Threads(String),
    #[error("unknown pattern {0}")]
    UnknownPattern(PatternId),
}

const US_PER_S: f64 = 1e6;

fn to_us(t: f64) -> i64 {
    (t * US_PER_S).round() as i64
}

fn to_s(t: i64) -> f64 {
    t as f64 / US_PER_S
}

/// Per-trial seed: SplitMix64 of the base seed mixed with SplitMix64 of the index.
pub fn trial_seed(base_seed: u64, trial: u64) -> u64 {
    mix64(base_seed ^ mix64(trial))
}

/// Radio surroundings of a session.
#[derive(Clone, Copy, Debug)]
pub struct Link<'a> {
    pub channel: &'a ChannelParams,
    pub trajectory: &'a Trajectory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Event {
    Beacon(usize),
    Sample(u64),
}

impl Event {
    fn class(self) -> u8 {
        match self {
            Event::Beacon(_) => 0,
            Event::Sample(_) => 1,
        }
    }
}

/// Power steps on the microsecond clock, so emitter and sensor agree on
/// which side of a slot boundary a poll falls.
struct Carrier {
    steps: Vec<(i64, i64, f64)>,
    idle_dbm: f64,
}

impl Carrier {
    fn new(tl: &EmissionTimeline, offset_us: i64) -> Self {
        let steps = tl.power_steps.iter().map(|s| (offset_us + to_us(s.start), offset_us + to_us(s.end), s.dbm)).collect();
        Self { steps, idle_dbm: tl.idle_dbm }
    }

    fn dbm_at(&self, t: i64) -> f64 {
        let i = self.steps.partition_point(|s| s.0 <= t);
        match i.checked_sub(1).map(|j| self.steps[j]) {
            Some((_, end, dbm)) if t < end => dbm,
            _ => self.idle_dbm,
        }
    }
}

/// Plays `timeline`, starting at `start_s`, to a fresh session of `sensor`.
/// The trajectory is evaluated on the session's local clock.
#[allow(clippy::too_many_arguments)]
pub fn play_session<R: Rng + ?Sized>(
    timeline: &EmissionTimeline,
    start_s: f64,
    link: Link<'_>,
    cfg: &SensorConfig,
    store: &PatternStore,
    expected_tu_s: f64,
    app: Option<AppExchange>,
    sensor: &mut Sensor,
    rng: &mut R,
) -> Result<AuthResult, SimError> {
    let start_us = to_us(start_s);
    let period_us = to_us(cfg.sample_period_s()).max(1);
    let phase_us = rng.random_range(0..period_us);
    let carrier = Carrier::new(timeline, start_us);
    let watchdog_us = to_us(cfg.watchdog_for(expected_tu_s, store.longest_gap_tu()));
    let horizon_us = start_us + to_us(timeline.duration_s) + watchdog_us + 2 * period_us;

    let mut session =
        Session::new(cfg, store, timeline.slot_s, expected_tu_s, start_s).ignore_until(sensor.quiet_until);
    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<_>, t: i64, e: Event| heap.push(Reverse((t, e.class(), e)));
    for (i, b) in timeline.beacons.iter().enumerate() {
        push(&mut heap, start_us + to_us(b.t), Event::Beacon(i));
    }
    push(&mut heap, start_us + phase_us, Event::Sample(0));

    let distance = |t_us: i64| link.trajectory.distance_at(to_s(t_us - start_us));
    // detected beacons waiting for the poll that will timestamp them
    let mut pending: Vec<(u64, usize)> = Vec::new();
    let mut now_us = start_us;
    while let Some(Reverse((t, _, event))) = heap.pop() {
        if session.is_done() || t > horizon_us {
            break;
        }
        now_us = t;
        match event {
            Event::Beacon(i) => {
                if received_power(timeline.beacon_dbm, distance(t), link.channel, rng)?.is_some() {
                    let j = (t - start_us - phase_us + period_us - 1).div_euclid(period_us).max(0) as u64;
                    pending.push((j, i));
                }
            }
            Event::Sample(j) => {
                let ts = to_s(t);
                while let Some(&(_, i)) = pending.first().filter(|(pj, _)| *pj <= j) {
                    pending.remove(0);
                    let b = &timeline.beacons[i];
                    let obs = BeaconObservation { t: ts, channel: b.channel, seq_no: b.seq_no, nonce: b.nonce };
                    session.on_beacon(obs, &mut sensor.history);
                }
                let rssi = received_power(carrier.dbm_at(t), distance(t), link.channel, rng)?;
                session.on_sample(ObservedSample { t: ts, rssi });
                push(&mut heap, t + period_us, Event::Sample(j + 1));
            }
        }
    }
    session.end_of_input(to_s(now_us.max(start_us)));
    let result = session.conclude(app);
    sensor.record(&result);
    Ok(result)
}

/// Outcome of one Monte Carlo trial.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub trial: u64,
    pub actor: &'static str,
    /// Ground truth: should this session have been accepted.
    pub legit: bool,
    /// What the actor transmitted, in pattern grammar.
    pub emitted: String,
    pub result: AuthResult,
}

impl TrialOutcome {
    pub fn false_accept(&self) -> bool {
        !self.legit && self.result.verdict.is_accepted()
    }

    pub fn false_reject(&self) -> bool {
        self.legit && !self.result.verdict.is_accepted()
    }
}

/// Runs trial `trial` of `scenario`. Trials are independent of each other
/// and of the thread that runs them.
pub fn run_trial(scenario: &Scenario, trial: u64) -> Result<TrialOutcome, SimError> {
    let c = &scenario.config;
    let seed = trial_seed(c.run.seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sensor = Sensor::new(&c.sensor);
    let link = Link { channel: &c.channel, trajectory: &c.trajectory };
    let store = &scenario.store;
    let stored = |id: u32| store.get(PatternId(id)).ok_or(SimError::UnknownPattern(PatternId(id)));
    let secret = c.sensor.app_secret.clone().unwrap_or_default();
    let exchange = |message: String, extra_s: f64| Some(AppExchange { message, rtt_s: c.run.base_rtt_s + extra_s });

    let (legit, emitted, timeline, tu_s, app) = match &c.actor {
        Actor::Legit { pattern_id } => {
            let p = stored(*pattern_id)?;
            let tl = compile_schedule(p, &c.slots, &c.tx, seed)?;
            (true, render_pattern(p), tl, c.slots.tu_s, exchange(secret, 0.0))
        }
        Actor::Mitm { pattern_id, extra_delay_s } => {
            let p = stored(*pattern_id)?;
            let tl = compile_schedule(p, &c.slots, &c.tx, seed)?;
            (false, render_pattern(p), tl, c.slots.tu_s, exchange(secret, *extra_delay_s))
        }
        Actor::Mutant { pattern_id, mutation } => {
            let p = mutate(stored(*pattern_id)?, *mutation)?;
            let tl = compile_triplets(&p, &c.slots, &c.tx, seed)?;
            (false, render_pattern(&p), tl, c.slots.tu_s, exchange(String::new(), 0.0))
        }
        Actor::BruteForce { n, l } => {
            let p = brute_force_candidate(&mut rng, *n, *l, c.band.channel_count(), c.store.max_tu)?;
            let tl = compile_triplets(&p, &c.slots, &c.tx, seed)?;
            (false, render_pattern(&p), tl, c.slots.tu_s, exchange(String::new(), 0.0))
        }
        Actor::Replay { source_trial, pattern_id } => {
            let p = stored(*pattern_id)?;
            let original = compile_schedule(p, &c.slots, &c.tx, trial_seed(c.run.seed, *source_trial))?;
            let heard = play_session(
                &original,
                0.0,
                link,
                &c.sensor,
                store,
                c.slots.tu_s,
                exchange(secret, 0.0),
                &mut sensor,
                &mut rng,
            )?;
            let start = heard.ended_s.max(original.duration_s) + c.slots.tu_s;
            let tl = replay_timeline(&original);
            let result = play_session(
                &tl,
                start,
                link,
                &c.sensor,
                store,
                c.slots.tu_s,
                exchange(String::new(), 0.0),
                &mut sensor,
                &mut rng,
            )?;
            return Ok(TrialOutcome { trial, actor: c.actor.name(), legit: false, emitted: render_pattern(p), result });
        }
        Actor::Survey { .. } => {
            let (p, tu_s) = &scenario.survey[(trial % scenario.survey.len() as u64) as usize];
            let slots = crate::emitter::SlotConfig { tu_s: *tu_s, ..c.slots };
            let tl = compile_schedule(p, &slots, &c.tx, seed)?;
            let legit = store.find(&p.triplets).is_some();
            (legit, render_pattern(p), tl, *tu_s, exchange(secret, 0.0))
        }
    };
    let result = play_session(&timeline, 0.0, link, &c.sensor, store, tu_s, app, &mut sensor, &mut rng)?;
    Ok(TrialOutcome { trial, actor: c.actor.name(), legit, emitted, result })
}
