//! Offline triplet extraction from a recorded beacon list and RSSI trace.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::decode::{decode_slots, DecodeError, ObservedSample};
use super::{quantize_interval, BeaconObservation, SensorConfig};
use crate::band::ChannelId;
use crate::pattern::{Triplet, TxPattern};

/// A triplet before its gap is expressed in TUs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawTriplet {
    pub tx_pattern: TxPattern,
    pub channel: ChannelId,
    pub raw_interval_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractError {
    #[error("no beacon observed")]
    NoBeacons,
    #[error("triplet {index}: {source}")]
    Undecodable {
        index: usize,
        #[source]
        source: DecodeError,
    },
    #[error("triplet {index}: gap of {raw_s:.3} s is not a whole multiple of the {tu_s:.3} s time unit")]
    Quantization { index: usize, raw_s: f64, tu_s: f64 },
}

impl ExtractError {
    pub fn index(&self) -> Option<usize> {
        match self {
            ExtractError::NoBeacons => None,
            ExtractError::Undecodable { index, .. } | ExtractError::Quantization { index, .. } => Some(*index),
        }
    }
}

/// `samples` must be sorted by time.
pub fn extract_raw_triplets(
    beacons: &[BeaconObservation],
    samples: &[ObservedSample],
    n: usize,
    slot_s: f64,
    delta_db: f64,
) -> Result<Vec<RawTriplet>, ExtractError> {
    if beacons.is_empty() {
        return Err(ExtractError::NoBeacons);
    }
    let mut out = Vec::with_capacity(beacons.len());
    for (index, b) in beacons.iter().enumerate() {
        let end = b.t + n as f64 * slot_s;
        let lo = samples.partition_point(|s| s.t < b.t - 1e-9);
        let hi = samples.partition_point(|s| s.t < end + 1e-9);
        let tx_pattern = decode_slots(&samples[lo..hi], b.t, slot_s, n, delta_db)
            .map_err(|source| ExtractError::Undecodable { index, source })?;
        let raw_interval_s = index.checked_sub(1).map(|p| b.t - beacons[p].t);
        out.push(RawTriplet { tx_pattern, channel: b.channel, raw_interval_s });
    }
    Ok(out)
}

/// Converts raw gaps to TUs, taking the first gap as the unit.
pub fn triplets_from_raw(raw: &[RawTriplet], eps_tu: f64) -> Result<Vec<Triplet>, ExtractError> {
    let tu_s = raw.get(1).and_then(|r| r.raw_interval_s);
    raw.iter()
        .enumerate()
        .map(|(index, r)| {
            let interval_tu = match (index, r.raw_interval_s, tu_s) {
                (0, _, _) => None,
                (1, _, _) => Some(1),
                (_, Some(raw_s), Some(tu_s)) => Some(
                    quantize_interval(raw_s, tu_s, eps_tu)
                        .ok_or(ExtractError::Quantization { index, raw_s, tu_s })?,
                ),
                _ => unreachable!("raw gaps exist from index 1"),
            };
            Ok(Triplet { tx_pattern: r.tx_pattern, channel: r.channel, interval_tu })
        })
        .collect()
}

pub fn extract_triplets(
    beacons: &[BeaconObservation],
    samples: &[ObservedSample],
    cfg: &SensorConfig,
    slot_s: f64,
) -> Result<Vec<Triplet>, ExtractError> {
    let raw = extract_raw_triplets(beacons, samples, cfg.n, slot_s, cfg.delta_db)?;
    triplets_from_raw(&raw, cfg.eps_tu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emitter::Nonce;

    fn beacon(t: f64, ch: u16) -> BeaconObservation {
        BeaconObservation { t, channel: ChannelId::new(ch).unwrap(), seq_no: 0, nonce: Nonce(0) }
    }

    /// 5 Hz trace with 010 after every beacon.
    fn trace(beacons: &[BeaconObservation], until: f64) -> Vec<ObservedSample> {
        let steps = (until * 5.0).round() as usize;
        (0..steps)
            .map(|j| {
                let t = j as f64 / 5.0;
                let high = beacons.iter().any(|b| t >= b.t + 0.6 - 1e-9 && t < b.t + 1.2 - 1e-9);
                ObservedSample { t, rssi: Some(if high { -50.0 } else { -56.0 }) }
            })
            .collect()
    }

    #[test]
    fn intervals_from_measured_unit() {
        let beacons = [beacon(0.0, 1), beacon(4.0, 2), beacon(12.0, 3)];
        let samples = trace(&beacons, 16.0);
        let ts = extract_triplets(&beacons, &samples, &SensorConfig::default(), 0.6).unwrap();
        let intervals: Vec<_> = ts.iter().map(|t| t.interval_tu).collect();
        assert_eq!(intervals, vec![None, Some(1), Some(2)]);
        assert!(ts.iter().all(|t| t.tx_pattern.to_string() == "010"));
    }

    #[test]
    fn off_grid_gap_fails_quantization() {
        let beacons = [beacon(0.0, 1), beacon(4.0, 2), beacon(10.0, 3)];
        let samples = trace(&beacons, 14.0);
        let err = extract_triplets(&beacons, &samples, &SensorConfig::default(), 0.6).unwrap_err();
        assert_eq!(err.index(), Some(2));
        assert!(matches!(err, ExtractError::Quantization { .. }));
    }

    #[test]
    fn empty_and_undecodable() {
        let cfg = SensorConfig::default();
        assert_eq!(extract_triplets(&[], &[], &cfg, 0.6), Err(ExtractError::NoBeacons));
        let beacons = [beacon(0.0, 1), beacon(4.0, 2)];
        let flat: Vec<_> = (0..40).map(|j| ObservedSample { t: j as f64 / 5.0, rssi: Some(-50.0) }).collect();
        let err = extract_triplets(&beacons, &flat, &cfg, 0.6).unwrap_err();
        assert!(matches!(err, ExtractError::Undecodable { index: 0, .. }));
    }
}
