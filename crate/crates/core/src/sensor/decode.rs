//! Reading txpower bits out of an RSSI window by relative level.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::TxPattern;

/// One RSSI poll. `rssi` is `None` when nothing was above the noise floor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservedSample {
    pub t: f64,
    pub rssi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecodeError {
    #[error("slot {slot} holds {count} samples, need at least 2")]
    SparseSlot { slot: usize, count: usize },
    #[error("every sample of slot {slot} is below the noise floor")]
    AllAbsent { slot: usize },
    #[error("slot medians span only {spread:.2} dB")]
    NoContrast { spread: f64 },
    #[error("transition into slot {slot} is only {jump:.2} dB")]
    WeakTransition { slot: usize, jump: f64 },
}

// Slot boundaries are computed in floating point from microsecond-exact
// timestamps; the slack keeps a sample sitting on a boundary in the later slot.
const BOUNDARY_SLACK: f64 = 1e-9;

/// Index of the slot containing `t` for a burst starting at `start`.
pub fn slot_index(t: f64, start: f64, slot_s: f64) -> Option<usize> {
    let x = (t - start) / slot_s + BOUNDARY_SLACK;
    (x >= 0.0).then(|| x.floor() as usize)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    }
}

/// Median received power per slot over the samples that were detected.
pub fn slot_medians(
    window: &[ObservedSample],
    start: f64,
    slot_s: f64,
    n: usize,
) -> Result<Vec<f64>, DecodeError> {
    let mut slots: Vec<(usize, Vec<f64>)> = vec![(0, Vec::new()); n];
    for s in window {
        if let Some(k) = slot_index(s.t, start, slot_s).filter(|&k| k < n) {
            slots[k].0 += 1;
            if let Some(r) = s.rssi {
                slots[k].1.push(r);
            }
        }
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(slot, (count, mut present))| {
            if count < 2 {
                Err(DecodeError::SparseSlot { slot, count })
            } else if present.is_empty() {
                Err(DecodeError::AllAbsent { slot })
            } else {
                Ok(median(&mut present))
            }
        })
        .collect()
}

/// Midrange threshold over the slot medians, then every bit flip must be a
/// jump of at least `delta_db`.
pub fn bits_from_medians(medians: &[f64], delta_db: f64) -> Result<TxPattern, DecodeError> {
    let max = medians.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = medians.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max - min;
    if !(spread >= delta_db) {
        return Err(DecodeError::NoContrast { spread });
    }
    let threshold = (max + min) / 2.0;
    let bits: Vec<bool> = medians.iter().map(|&m| m > threshold).collect();
    for k in 1..bits.len() {
        let jump = (medians[k] - medians[k - 1]).abs();
        if bits[k] != bits[k - 1] && jump < delta_db {
            return Err(DecodeError::WeakTransition { slot: k, jump });
        }
    }
    Ok(TxPattern::from_bools(&bits).expect("width checked by caller"))
}

/// Decodes the `n`-slot burst starting at `start`.
pub fn decode_slots(
    window: &[ObservedSample],
    start: f64,
    slot_s: f64,
    n: usize,
    delta_db: f64,
) -> Result<TxPattern, DecodeError> {
    let medians = slot_medians(window, start, slot_s, n)?;
    bits_from_medians(&medians, delta_db)
}
