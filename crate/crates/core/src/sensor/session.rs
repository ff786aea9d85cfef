//! Streaming authentication session.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::decode::{decode_slots, slot_index, DecodeError, ObservedSample};
use super::extract::RawTriplet;
use super::{app_gate, mitm_check, quantize_interval, BeaconObservation, SensorConfig};
use crate::emitter::Nonce;
use crate::matcher::{MatchStatus, MatcherState, Mismatch, PatternStore};
use crate::pattern::{PatternId, Triplet};

/// Bounded FIFO of nonces already heard.
#[derive(Clone, Debug)]
pub struct NonceHistory {
    capacity: usize,
    order: VecDeque<Nonce>,
    seen: HashSet<Nonce>,
}

impl NonceHistory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "history capacity must be positive");
        Self { capacity, order: VecDeque::with_capacity(capacity.min(4096)), seen: HashSet::new() }
    }

    pub fn contains(&self, nonce: Nonce) -> bool {
        self.seen.contains(&nonce)
    }

    /// Returns `false` when the nonce was already present.
    pub fn insert(&mut self, nonce: Nonce) -> bool {
        if !self.seen.insert(nonce) {
            return false;
        }
        if self.order.len() == self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.seen.remove(&old);
            }
        }
        self.order.push_back(nonce);
        true
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RejectReason {
    Mismatch(Mismatch),
    Undecodable { index: usize, error: DecodeError },
    Quantization { index: usize },
    Replay { index: usize },
    AppSecret,
    Mitm { rtt_s: f64 },
}

impl RejectReason {
    /// Compact key used in reports and reason counts.
    pub fn label(&self) -> String {
        match self {
            RejectReason::Mismatch(m) => m.label(),
            RejectReason::Undecodable { index, .. } => format!("undecodable@{index}"),
            RejectReason::Quantization { index } => format!("quantization@{index}"),
            RejectReason::Replay { .. } => "replay".into(),
            RejectReason::AppSecret => "app_secret".into(),
            RejectReason::Mitm { .. } => "mitm".into(),
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Mismatch(m) => write!(f, "{m}"),
            RejectReason::Undecodable { index, error } => write!(f, "undecodable burst at index {index}: {error}"),
            RejectReason::Quantization { index } => write!(f, "gap before index {index} is not a whole number of TUs"),
            RejectReason::Replay { .. } => f.write_str("replay"),
            RejectReason::AppSecret => f.write_str("application-layer secret mismatch"),
            RejectReason::Mitm { rtt_s } => write!(f, "round trip of {rtt_s:.3} s suggests a relay"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Accepted(PatternId),
    Rejected(RejectReason),
    TimedOut,
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Accepted(_) => "accepted",
            Verdict::Rejected(_) => "rejected",
            Verdict::TimedOut => "timed_out",
        }
    }

    /// `accepted`, `timeout`, or the rejection label.
    pub fn label(&self) -> String {
        match self {
            Verdict::Accepted(_) => "accepted".into(),
            Verdict::Rejected(r) => r.label(),
            Verdict::TimedOut => "timeout".into(),
        }
    }
}

/// The application-layer exchange that follows a physical-layer accept.
#[derive(Clone, Debug, PartialEq)]
pub struct AppExchange {
    pub message: String,
    pub rtt_s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuthResult {
    pub verdict: Verdict,
    pub phy_ok: bool,
    /// Present only when the physical layer accepted and a secret is configured.
    pub app_ok: Option<bool>,
    pub rtt_s: Option<f64>,
    pub transcript: Vec<Triplet>,
    pub raw_transcript: Vec<RawTriplet>,
    pub started_s: f64,
    pub ended_s: f64,
}

impl AuthResult {
    pub fn duration_s(&self) -> f64 {
        self.ended_s - self.started_s
    }
}

/// One listening session: consumes beacons and RSSI polls in time order.
#[derive(Debug)]
pub struct Session<'a> {
    cfg: &'a SensorConfig,
    store: &'a PatternStore,
    slot_s: f64,
    watchdog_s: f64,
    started_s: f64,
    ignore_until: f64,
    beacons: Vec<BeaconObservation>,
    window: Vec<ObservedSample>,
    window_open: bool,
    pending_interval: Option<u32>,
    tu_s: Option<f64>,
    matcher: MatcherState,
    transcript: Vec<Triplet>,
    raw: Vec<RawTriplet>,
    last_progress: f64,
    outcome: Option<(Verdict, f64)>,
}

impl<'a> Session<'a> {
    /// `expected_tu_s` only sizes the default watchdog; intervals are always
    /// measured against the first observed gap.
    pub fn new(
        cfg: &'a SensorConfig,
        store: &'a PatternStore,
        slot_s: f64,
        expected_tu_s: f64,
        started_s: f64,
    ) -> Self {
        Self {
            cfg,
            store,
            slot_s,
            watchdog_s: cfg.watchdog_for(expected_tu_s, store.longest_gap_tu()),
            started_s,
            ignore_until: f64::NEG_INFINITY,
            beacons: Vec::new(),
            window: Vec::new(),
            window_open: false,
            pending_interval: None,
            tu_s: None,
            matcher: MatcherState::new(store),
            transcript: Vec::new(),
            raw: Vec::new(),
            last_progress: started_s,
            outcome: None,
        }
    }

    /// Beacons earlier than `t` are dropped unseen.
    pub fn ignore_until(mut self, t: f64) -> Self {
        self.ignore_until = t;
        self
    }

    pub fn is_done(&self) -> bool {
        self.outcome.is_some()
    }

    pub fn measured_tu_s(&self) -> Option<f64> {
        self.tu_s
    }

    fn finish_with(&mut self, verdict: Verdict, t: f64) {
        if self.outcome.is_none() {
            self.window_open = false;
            self.outcome = Some((verdict, t));
        }
    }

    fn check_watchdog(&mut self, now: f64) -> bool {
        if now - self.last_progress > self.watchdog_s + 1e-9 {
            self.finish_with(Verdict::TimedOut, self.last_progress + self.watchdog_s);
            true
        } else {
            false
        }
    }

    pub fn on_beacon(&mut self, obs: BeaconObservation, history: &mut NonceHistory) {
        if self.is_done() || obs.t < self.ignore_until {
            return;
        }
        if self.check_watchdog(obs.t) {
            return;
        }
        let index = self.beacons.len();
        if !history.insert(obs.nonce) {
            self.finish_with(Verdict::Rejected(RejectReason::Replay { index }), obs.t);
            return;
        }
        if self.window_open {
            self.close_window(obs.t);
            if self.is_done() {
                return;
            }
        }
        let interval = match index {
            0 => None,
            1 => {
                self.tu_s = Some(obs.t - self.beacons[0].t);
                Some(1)
            }
            _ => {
                let raw = obs.t - self.beacons[index - 1].t;
                match self.tu_s.and_then(|tu| quantize_interval(raw, tu, self.cfg.eps_tu)) {
                    Some(k) => Some(k),
                    None => {
                        self.finish_with(Verdict::Rejected(RejectReason::Quantization { index }), obs.t);
                        return;
                    }
                }
            }
        };
        self.beacons.push(obs);
        self.pending_interval = interval;
        self.window.clear();
        self.window_open = true;
        self.last_progress = obs.t;
    }

    pub fn on_sample(&mut self, s: ObservedSample) {
        if self.is_done() || self.check_watchdog(s.t) || !self.window_open {
            return;
        }
        let start = self.beacons.last().expect("open window has a beacon").t;
        match slot_index(s.t, start, self.slot_s) {
            None => {}
            Some(k) if k < self.cfg.n => self.window.push(s),
            Some(_) => self.close_window(s.t),
        }
    }

    fn close_window(&mut self, now: f64) {
        self.window_open = false;
        let index = self.beacons.len() - 1;
        let beacon = self.beacons[index];
        let tx_pattern = match decode_slots(&self.window, beacon.t, self.slot_s, self.cfg.n, self.cfg.delta_db) {
            Ok(p) => p,
            Err(error) => {
                self.finish_with(Verdict::Rejected(RejectReason::Undecodable { index, error }), now);
                return;
            }
        };
        let raw_interval_s = index.checked_sub(1).map(|p| beacon.t - self.beacons[p].t);
        self.raw.push(RawTriplet { tx_pattern, channel: beacon.channel, raw_interval_s });
        let triplet = Triplet { tx_pattern, channel: beacon.channel, interval_tu: self.pending_interval };
        self.transcript.push(triplet);
        self.matcher = self.matcher.step(&triplet, self.store).expect("session stops at terminal status");
        match self.matcher.status() {
            MatchStatus::InProgress => {}
            MatchStatus::Accepted(id) => self.finish_with(Verdict::Accepted(id), now),
            MatchStatus::Rejected(m) => self.finish_with(Verdict::Rejected(RejectReason::Mismatch(m)), now),
        }
    }

    /// Closes any open burst and times the session out if it is still running.
    pub fn end_of_input(&mut self, now: f64) {
        if self.is_done() {
            return;
        }
        if self.check_watchdog(now) {
            return;
        }
        if self.window_open {
            self.close_window(now);
        }
        if !self.is_done() {
            self.finish_with(Verdict::TimedOut, now);
        }
    }

    /// Physical-layer verdict, once reached.
    pub fn phy_verdict(&self) -> Option<&Verdict> {
        self.outcome.as_ref().map(|(v, _)| v)
    }

    /// Applies the application-layer gate and the round-trip check to a
    /// physical-layer accept. `app` is `None` when no exchange took place.
    pub fn conclude(mut self, app: Option<AppExchange>) -> AuthResult {
        if !self.is_done() {
            let now = self.last_progress + self.watchdog_s;
            self.end_of_input(now);
        }
        let (phy, phy_t) = self.outcome.take().expect("session concluded");
        let phy_ok = phy.is_accepted();
        let mut verdict = phy;
        let mut app_ok = None;
        let mut rtt_s = None;
        let mut ended_s = phy_t;
        if phy_ok {
            if let Some(ex) = &app {
                rtt_s = Some(ex.rtt_s);
                ended_s += ex.rtt_s;
            }
            if self.cfg.app_secret.is_some() {
                let ok = app.as_ref().is_some_and(|ex| app_gate(&ex.message, self.cfg).unwrap_or(false));
                app_ok = Some(ok);
                if !ok {
                    verdict = Verdict::Rejected(RejectReason::AppSecret);
                }
            }
            if let Some(rtt) = rtt_s.filter(|&r| verdict.is_accepted() && mitm_check(r, self.cfg)) {
                verdict = Verdict::Rejected(RejectReason::Mitm { rtt_s: rtt });
            }
        }
        AuthResult {
            verdict,
            phy_ok,
            app_ok,
            rtt_s,
            transcript: self.transcript,
            raw_transcript: self.raw,
            started_s: self.started_s,
            ended_s,
        }
    }
}

/// State a sensor keeps across sessions: its nonce ledger and lockout.
#[derive(Clone, Debug)]
pub struct Sensor {
    pub history: NonceHistory,
    pub quiet_until: f64,
    lockout_s: f64,
}

impl Sensor {
    pub fn new(cfg: &SensorConfig) -> Self {
        Self {
            history: NonceHistory::new(cfg.history_capacity),
            quiet_until: f64::NEG_INFINITY,
            lockout_s: cfg.lockout_s,
        }
    }

    /// Starts the lockout after a failed session.
    pub fn record(&mut self, result: &AuthResult) {
        if !result.verdict.is_accepted() && self.lockout_s > 0.0 {
            self.quiet_until = result.ended_s + self.lockout_s;
        }
    }
}

/// Everything one offline session needs.
#[derive(Clone, Debug, Default)]
pub struct SessionInputs {
    pub beacons: Vec<BeaconObservation>,
    pub samples: Vec<ObservedSample>,
    pub started_s: f64,
    pub slot_s: f64,
    pub expected_tu_s: f64,
    pub app: Option<AppExchange>,
}

/// Runs a recorded session through the streaming machine. Beacons sort
/// before samples with the same timestamp.
pub fn authenticate(
    inputs: SessionInputs,
    store: &PatternStore,
    cfg: &SensorConfig,
    sensor: &mut Sensor,
) -> AuthResult {
    let mut session = Session::new(cfg, store, inputs.slot_s, inputs.expected_tu_s, inputs.started_s)
        .ignore_until(sensor.quiet_until);
    let (mut bi, mut si) = (0, 0);
    let (beacons, samples) = (&inputs.beacons, &inputs.samples);
    let mut last_t = inputs.started_s;
    while !session.is_done() && (bi < beacons.len() || si < samples.len()) {
        let take_beacon = match (beacons.get(bi), samples.get(si)) {
            (Some(b), Some(s)) => b.t <= s.t,
            (Some(_), None) => true,
            _ => false,
        };
        if take_beacon {
            last_t = beacons[bi].t;
            session.on_beacon(beacons[bi], &mut sensor.history);
            bi += 1;
        } else {
            last_t = samples[si].t;
            session.on_sample(samples[si]);
            si += 1;
        }
    }
    session.end_of_input(last_t);
    let result = session.conclude(inputs.app);
    sensor.record(&result);
    result
}
