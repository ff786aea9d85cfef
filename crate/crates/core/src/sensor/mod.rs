//! The dumb authenticator.
//!
//! A sensor polls RSSI at a fixed rate, timestamps beacons on its own clock,
//! turns each beacon plus its bit burst into a triplet and runs the triplets
//! through the matcher. The time unit is whatever gap it measured between the
//! first two beacons; later gaps are rounded to multiples of it.

mod decode;
mod extract;
mod session;

pub use decode::{bits_from_medians, decode_slots, slot_index, slot_medians, DecodeError, ObservedSample};
pub use extract::{extract_raw_triplets, extract_triplets, triplets_from_raw, ExtractError, RawTriplet};
pub use session::{
    authenticate, AppExchange, AuthResult, NonceHistory, RejectReason, Sensor, Session, SessionInputs, Verdict,
};

use serde::{Deserialize, Serialize};
use subtle::ConstantTimeEq;
use thiserror::Error;

use crate::band::ChannelId;
use crate::emitter::Nonce;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensorConfigError {
    #[error("invalid sensor configuration: {0}")]
    Invalid(String),
    #[error("{samples:.2} samples per slot at {f_s} Hz; need at least 2")]
    Undersampled { f_s: f64, samples: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    /// RSSI polling rate, Hz.
    pub f_s: f64,
    /// Expected txpower bits per triplet.
    pub n: usize,
    /// Relative tolerance when rounding a gap to whole TUs.
    pub eps_tu: f64,
    /// Minimum slot-median jump for a bit flip, dB.
    pub delta_db: f64,
    /// Round trips above this raise a man-in-the-middle alarm; `None` disables the check.
    pub rtt_limit_s: Option<f64>,
    /// Beacons are ignored for this long after a rejection.
    pub lockout_s: f64,
    /// Application-layer secret; `None` disables the second factor.
    pub app_secret: Option<String>,
    /// A session with no new beacon for this long times out; defaults to two
    /// time units past the longest stored gap, and never under eight units.
    pub watchdog_s: Option<f64>,
    /// Nonces remembered for replay detection.
    pub history_capacity: usize,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            f_s: 5.0,
            n: 3,
            eps_tu: 0.10,
            delta_db: 3.0,
            rtt_limit_s: Some(0.1),
            lockout_s: 0.0,
            app_secret: None,
            watchdog_s: None,
            history_capacity: 4096,
        }
    }
}

impl SensorConfig {
    pub fn validate(&self) -> Result<(), SensorConfigError> {
        let bad = |m: &str| Err(SensorConfigError::Invalid(m.to_string()));
        if !(self.f_s > 0.0) || !self.f_s.is_finite() {
            return bad("f_s must be positive");
        }
        if !(2..=64).contains(&self.n) {
            return bad("n must be within 2..=64");
        }
        if !(self.eps_tu > 0.0 && self.eps_tu < 0.5) {
            return bad("eps_tu must be within (0, 0.5)");
        }
        if !(self.delta_db > 0.0) {
            return bad("delta_db must be positive");
        }
        if self.rtt_limit_s.is_some_and(|r| !(r > 0.0)) {
            return bad("rtt_limit_s must be positive");
        }
        if !(self.lockout_s >= 0.0) {
            return bad("lockout_s must be non-negative");
        }
        if self.watchdog_s.is_some_and(|w| !(w > 0.0)) {
            return bad("watchdog_s must be positive");
        }
        if self.history_capacity == 0 {
            return bad("history_capacity must be at least 1");
        }
        Ok(())
    }

    /// The emitter profile must give at least two polls per slot.
    pub fn check_profile(&self, slot_s: f64) -> Result<(), SensorConfigError> {
        let samples = self.f_s * slot_s;
        if samples + 1e-9 < 2.0 {
            return Err(SensorConfigError::Undersampled { f_s: self.f_s, samples });
        }
        Ok(())
    }

    pub fn sample_period_s(&self) -> f64 {
        1.0 / self.f_s
    }

    pub fn watchdog_for(&self, expected_tu_s: f64, longest_gap_tu: u32) -> f64 {
        self.watchdog_s.unwrap_or(f64::from(longest_gap_tu.max(6) + 2) * expected_tu_s)
    }
}

/// A beacon as timestamped by the sensor. Only `t` and `channel` feed the
/// triplet; `seq_no` and `nonce` are frame metadata used for replay checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeaconObservation {
    pub t: f64,
    pub channel: ChannelId,
    pub seq_no: u64,
    pub nonce: Nonce,
}

/// `k = round(raw/tu)` when `k ≥ 1` and `|raw − k·tu| ≤ eps·tu`.
pub fn quantize_interval(raw_s: f64, tu_s: f64, eps: f64) -> Option<u32> {
    if !(raw_s > 0.0 && tu_s > 0.0) {
        return None;
    }
    let k = (raw_s / tu_s).round();
    if k < 1.0 || k > f64::from(u32::MAX) {
        return None;
    }
    ((raw_s - k * tu_s).abs() <= eps * tu_s).then_some(k as u32)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AppGateError {
    #[error("application-layer gate is disabled")]
    Disabled,
}

/// Constant-time comparison against the configured secret.
pub fn app_gate(received: &str, cfg: &SensorConfig) -> Result<bool, AppGateError> {
    let secret = cfg.app_secret.as_deref().ok_or(AppGateError::Disabled)?;
    Ok(bool::from(received.as_bytes().ct_eq(secret.as_bytes())))
}

/// `true` when the round trip is long enough to suspect a relay.
pub fn mitm_check(rtt_s: f64, cfg: &SensorConfig) -> bool {
    cfg.rtt_limit_s.is_some_and(|limit| rtt_s > limit)
}
