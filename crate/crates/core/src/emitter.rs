//! The smart side: lays a pattern out on an absolute clock.
//!
//! Beacon `i` goes out at `t_i`, with `t_0 = 0`, `t_1 = tu_s` and
//! `t_i = t_{i-1} + interval_i · tu_s`. Right after each beacon, `n` slots of
//! `slot_s` seconds carry that triplet's bits as high/low carrier power. The
//! carrier idles at the low level everywhere else. Beacon frames themselves
//! are sent at the high level.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::band::{BandPlan, ChannelId};
use crate::pattern::{check_shape, check_structure, PatternId, SecretPattern, Triplet, TxPattern, ValidationError};
use crate::radio::TxPowerLevels;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmitterError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("bit burst of {burst_s} s does not fit before the next beacon ({gap_s} s at triplet {index})")]
    Fit { index: usize, burst_s: f64, gap_s: f64 },
    #[error("invalid slot configuration: {0}")]
    BadSlots(&'static str),
    #[error("invalid mutation: {0}")]
    BadMutation(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlotConfig {
    /// Seconds per txpower bit slot.
    pub slot_s: f64,
    /// Seconds per time unit.
    pub tu_s: f64,
    /// Quiet time between the last slot and the next beacon.
    pub guard_s: f64,
}

impl Default for SlotConfig {
    fn default() -> Self {
        Self { slot_s: 0.6, tu_s: 4.0, guard_s: 0.2 }
    }
}

impl SlotConfig {
    pub fn validate(&self) -> Result<(), EmitterError> {
        if !(self.slot_s > 0.0) {
            return Err(EmitterError::BadSlots("slot_s must be positive"));
        }
        if !(self.tu_s > 0.0) {
            return Err(EmitterError::BadSlots("tu_s must be positive"));
        }
        if !(self.guard_s >= 0.0) {
            return Err(EmitterError::BadSlots("guard_s must be non-negative"));
        }
        Ok(())
    }

    pub fn burst_s(&self, n: usize) -> f64 {
        n as f64 * self.slot_s + self.guard_s
    }

    /// Checks that every bit burst ends before the following beacon.
    pub fn check_fit(&self, p: &SecretPattern) -> Result<(), EmitterError> {
        self.validate()?;
        let burst_s = self.burst_s(p.width());
        for (index, t) in p.triplets.iter().enumerate().skip(1) {
            let gap_s = f64::from(t.interval_tu.unwrap_or(1)) * self.tu_s;
            if burst_s > gap_s + 1e-9 {
                return Err(EmitterError::Fit { index, burst_s, gap_s });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Nonce(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeaconEmission {
    pub t: f64,
    pub channel: ChannelId,
    pub seq_no: u64,
    pub nonce: Nonce,
}

/// Carrier power over `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerStep {
    pub start: f64,
    pub end: f64,
    pub dbm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmissionTimeline {
    pub beacons: Vec<BeaconEmission>,
    pub power_steps: Vec<PowerStep>,
    pub duration_s: f64,
    /// Power of the beacon frames themselves.
    pub beacon_dbm: f64,
    /// Carrier level outside bit slots and after `duration_s`.
    pub idle_dbm: f64,
    pub slot_s: f64,
    pub width: usize,
    /// Ground truth only; a sensor never reads this.
    pub replayed: bool,
}

impl EmissionTimeline {
    /// Carrier power at `t`; idle level outside `[0, duration_s)`.
    pub fn power_at(&self, t: f64) -> f64 {
        let i = self.power_steps.partition_point(|s| s.start <= t);
        match i.checked_sub(1).map(|j| &self.power_steps[j]) {
            Some(step) if t < step.end => step.dbm,
            _ => self.idle_dbm,
        }
    }

    pub fn channels(&self) -> impl Iterator<Item = ChannelId> + '_ {
        self.beacons.iter().map(|b| b.channel)
    }

    /// Line-oriented dump: a header, one `beacon` line per beacon and one
    /// `power` line per step.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "timeline duration_s={:.6} beacons={} width={} slot_s={:.6} beacon_dbm={:.3} idle_dbm={:.3} replayed={}",
            self.duration_s,
            self.beacons.len(),
            self.width,
            self.slot_s,
            self.beacon_dbm,
            self.idle_dbm,
            self.replayed
        );
        for b in &self.beacons {
            let _ = writeln!(
                out,
                "beacon seq={} t={:.6} channel={} nonce={:016x}",
                b.seq_no, b.t, b.channel, b.nonce.0
            );
        }
        for s in &self.power_steps {
            let _ = writeln!(out, "power start={:.6} end={:.6} dbm={:.3}", s.start, s.end, s.dbm);
        }
        out
    }
}

/// SplitMix64 finaliser; used for nonces and seed splitting.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Compiles a stored credential. The pattern must pass
/// [`check_structure`]; see [`compile_triplets`] for arbitrary sequences.
///
/// Nonces are derived from `session` and the beacon sequence number, so two
/// sessions with different ids never share nonces in practice.
pub fn compile_schedule(
    p: &SecretPattern,
    cfg: &SlotConfig,
    tx: &TxPowerLevels,
    session: u64,
) -> Result<EmissionTimeline, EmitterError> {
    check_structure(p)?;
    compile_triplets(p, cfg, tx, session)
}

/// Like [`compile_schedule`] but accepts any well-shaped sequence, including
/// all-equal bit patterns that a brute-force emitter may try.
pub fn compile_triplets(
    p: &SecretPattern,
    cfg: &SlotConfig,
    tx: &TxPowerLevels,
    session: u64,
) -> Result<EmissionTimeline, EmitterError> {
    check_shape(p)?;
    cfg.check_fit(p)?;

    let n = p.width();
    let mut beacons = Vec::with_capacity(p.len());
    let mut power_steps = Vec::with_capacity(p.len() * (n + 1));
    let mut elapsed_tu: u64 = 0;
    let session_key = mix64(session);
    for (i, t) in p.triplets.iter().enumerate() {
        elapsed_tu += u64::from(t.interval_tu.unwrap_or(0));
        let start = elapsed_tu as f64 * cfg.tu_s;
        beacons.push(BeaconEmission {
            t: start,
            channel: t.channel,
            seq_no: i as u64,
            nonce: Nonce(mix64(session_key ^ i as u64)),
        });
        if let Some(prev_end) = power_steps.last().map(|s: &PowerStep| s.end) {
            if prev_end < start {
                power_steps.push(PowerStep { start: prev_end, end: start, dbm: tx.low_dbm });
            }
        }
        for (k, bit) in t.tx_pattern.iter().enumerate() {
            power_steps.push(PowerStep {
                start: start + k as f64 * cfg.slot_s,
                end: start + (k + 1) as f64 * cfg.slot_s,
                dbm: tx.level(bit),
            });
        }
    }
    let last_start = beacons.last().map_or(0.0, |b| b.t);
    let bits_end = last_start + n as f64 * cfg.slot_s;
    let duration_s = last_start + cfg.burst_s(n);
    if duration_s > bits_end {
        power_steps.push(PowerStep { start: bits_end, end: duration_s, dbm: tx.low_dbm });
    }
    Ok(EmissionTimeline {
        beacons,
        power_steps,
        duration_s,
        beacon_dbm: tx.high_dbm,
        idle_dbm: tx.low_dbm,
        slot_s: cfg.slot_s,
        width: n,
        replayed: false,
    })
}

/// One-field corruption of a pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Mutation {
    FlipTxBit { triplet: usize, bit: usize },
    WrongChannel { triplet: usize, channel: ChannelId },
    WrongInterval { triplet: usize, tu: u32 },
}

pub fn mutate(p: &SecretPattern, m: Mutation) -> Result<SecretPattern, EmitterError> {
    let mut out = p.clone();
    let len = p.len();
    let bad = |msg: String| Err(EmitterError::BadMutation(msg));
    match m {
        Mutation::FlipTxBit { triplet, bit } => {
            let Some(t) = out.triplets.get_mut(triplet) else {
                return bad(format!("triplet {triplet} out of range for length {len}"));
            };
            if bit >= t.tx_pattern.width() {
                return bad(format!("bit {bit} out of range for width {}", t.tx_pattern.width()));
            }
            t.tx_pattern = t.tx_pattern.with_flipped(bit);
            if !t.tx_pattern.has_both_symbols() {
                return bad(format!("flipping bit {bit} of triplet {triplet} leaves all-equal bits"));
            }
        }
        Mutation::WrongChannel { triplet, channel } => {
            let Some(t) = out.triplets.get_mut(triplet) else {
                return bad(format!("triplet {triplet} out of range for length {len}"));
            };
            if t.channel == channel {
                return bad(format!("triplet {triplet} is already on channel {channel}"));
            }
            t.channel = channel;
        }
        Mutation::WrongInterval { triplet, tu } => {
            if triplet < 2 || triplet >= len {
                return bad(format!("interval of triplet {triplet} cannot change (length {len})"));
            }
            if tu == 0 {
                return bad("interval must be at least 1 TU".into());
            }
            let t = &mut out.triplets[triplet];
            if t.interval_tu == Some(tu) {
                return bad(format!("triplet {triplet} already has interval {tu}"));
            }
            t.interval_tu = Some(tu);
        }
    }
    Ok(out)
}

fn random_bits<R: Rng + ?Sized>(rng: &mut R, n: usize) -> u64 {
    if n == 64 {
        rng.random()
    } else {
        rng.random_range(0..1u64 << n)
    }
}

fn random_sequence<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    l: usize,
    channel_count: u16,
    max_tu: u32,
    mut bits: impl FnMut(&mut R) -> u64,
) -> Vec<Triplet> {
    (0..l)
        .map(|i| {
            let tx_pattern = TxPattern::new(bits(rng), n).expect("width checked by caller");
            let channel = ChannelId::new(rng.random_range(1..=channel_count)).expect("positive");
            let interval_tu = match i {
                0 => None,
                1 => Some(1),
                _ => Some(rng.random_range(1..=max_tu)),
            };
            Triplet { tx_pattern, channel, interval_tu }
        })
        .collect()
}

/// Uniform draw over valid credentials: bit patterns with both symbols,
/// uniform channels, intervals uniform in `1..=max_tu` from index 2 on.
pub fn random_pattern<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    l: usize,
    band: &BandPlan,
    max_tu: u32,
) -> Result<SecretPattern, EmitterError> {
    if !(2..=64).contains(&n) {
        return Err(ValidationError::BadWidth { width: n }.into());
    }
    if l < 2 {
        return Err(ValidationError::BadLength { len: l }.into());
    }
    if max_tu == 0 {
        return Err(EmitterError::BadMutation("max_tu must be at least 1".into()));
    }
    let all_ones = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let triplets = random_sequence(rng, n, l, band.channel_count(), max_tu, |r| loop {
        let v = random_bits(r, n);
        if v != 0 && v != all_ones {
            break v;
        }
    });
    Ok(SecretPattern::new(PatternId(0), triplets))
}

/// Uniform draw over the whole brute-force search space, all-equal bit
/// patterns included.
pub fn brute_force_candidate<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    l: usize,
    channel_count: u16,
    max_tu: u32,
) -> Result<SecretPattern, EmitterError> {
    if !(1..=64).contains(&n) {
        return Err(ValidationError::BadWidth { width: n }.into());
    }
    if l < 2 {
        return Err(ValidationError::BadLength { len: l }.into());
    }
    if channel_count == 0 || max_tu == 0 {
        return Err(EmitterError::BadMutation("channels and max_tu must be at least 1".into()));
    }
    let triplets = random_sequence(rng, n, l, channel_count, max_tu, |r| random_bits(r, n));
    Ok(SecretPattern::new(PatternId(u32::MAX), triplets))
}

/// Verbatim re-transmission of a captured timeline, nonces included.
pub fn replay_timeline(t: &EmissionTimeline) -> EmissionTimeline {
    EmissionTimeline { replayed: true, ..t.clone() }
}
