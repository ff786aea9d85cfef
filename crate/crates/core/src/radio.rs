//! Log-distance path loss with Gaussian shadowing, plus UAV-sensor distance
//! profiles.
//!
//! The default calibration places the detection edge of the high txpower
//! level (13 dBm) just above 40 m and that of the low level (7 dBm) just
//! above 30 m. Past 30 m the low slots drop below the floor and the high/low
//! structure can no longer be read, while beacons sent at the high level are
//! still heard out to about 40 m.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadioError {
    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),
    #[error("invalid channel parameters: {0}")]
    InvalidParams(&'static str),
    #[error("invalid txpower levels: high {high} dBm must exceed low {low} dBm")]
    InvalidLevels { high: f64, low: f64 },
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    /// Path loss at the reference distance, dB.
    pub pl0_db: f64,
    /// Reference distance, m.
    pub d0: f64,
    /// Path-loss exponent.
    pub gamma: f64,
    /// Shadowing standard deviation, dB.
    pub sigma_db: f64,
    /// Received power below this is undetectable, dBm.
    pub noise_floor_dbm: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            pl0_db: 34.0,
            d0: 0.5,
            gamma: 4.8,
            sigma_db: 2.0,
            noise_floor_dbm: -112.5,
        }
    }
}

impl ChannelParams {
    pub fn noiseless() -> Self {
        Self { sigma_db: 0.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), RadioError> {
        if !(self.d0 > 0.0) {
            return Err(RadioError::InvalidParams("d0 must be positive"));
        }
        if !(self.gamma > 0.0) {
            return Err(RadioError::InvalidParams("gamma must be positive"));
        }
        if !(self.sigma_db >= 0.0) {
            return Err(RadioError::InvalidParams("sigma_db must be non-negative"));
        }
        if !self.pl0_db.is_finite() || !self.noise_floor_dbm.is_finite() {
            return Err(RadioError::InvalidParams("pl0_db and noise_floor_dbm must be finite"));
        }
        Ok(())
    }

    /// Largest distance at which `tx_dbm` stays at or above the floor without shadowing.
    pub fn detection_range(&self, tx_dbm: f64) -> f64 {
        let budget = tx_dbm - self.pl0_db - self.noise_floor_dbm;
        self.d0 * 10f64.powf(budget / (10.0 * self.gamma))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TxPowerLevels {
    pub high_dbm: f64,
    pub low_dbm: f64,
}

impl TxPowerLevels {
    pub fn new(high_dbm: f64, low_dbm: f64) -> Result<Self, RadioError> {
        let levels = Self { high_dbm, low_dbm };
        levels.validate()?;
        Ok(levels)
    }

    pub fn validate(&self) -> Result<(), RadioError> {
        if self.high_dbm > self.low_dbm && self.high_dbm.is_finite() && self.low_dbm.is_finite() {
            Ok(())
        } else {
            Err(RadioError::InvalidLevels { high: self.high_dbm, low: self.low_dbm })
        }
    }

    pub fn level(&self, bit: bool) -> f64 {
        if bit {
            self.high_dbm
        } else {
            self.low_dbm
        }
    }
}

impl Default for TxPowerLevels {
    fn default() -> Self {
        Self { high_dbm: 13.0, low_dbm: 7.0 }
    }
}

/// `pl0 + 10·γ·log10(d/d0)`.
pub fn path_loss(d: f64, p: &ChannelParams) -> Result<f64, RadioError> {
    if !(d > 0.0) {
        return Err(RadioError::NonPositiveDistance(d));
    }
    Ok(p.pl0_db + 10.0 * p.gamma * (d / p.d0).log10())
}

/// Received power in dBm, or `None` when it falls below the noise floor.
///
/// Exactly one standard normal is drawn per call, whatever `sigma_db` is, so
/// runs that differ only in `sigma_db` consume the random stream identically.
pub fn received_power<R: Rng + ?Sized>(
    tx_dbm: f64,
    d: f64,
    p: &ChannelParams,
    rng: &mut R,
) -> Result<Option<f64>, RadioError> {
    let loss = path_loss(d, p)?;
    let z: f64 = rng.sample(StandardNormal);
    let rssi = tx_dbm - loss + p.sigma_db * z;
    Ok((rssi >= p.noise_floor_dbm).then_some(rssi))
}

/// Time-to-distance profile, piecewise linear between waypoints and clamped
/// outside them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrajectoryRaw", into = "TrajectoryRaw")]
pub struct Trajectory {
    waypoints: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryRaw {
    waypoints: Vec<(f64, f64)>,
}

impl TryFrom<TrajectoryRaw> for Trajectory {
    type Error = RadioError;

    fn try_from(raw: TrajectoryRaw) -> Result<Self, Self::Error> {
        Trajectory::new(raw.waypoints)
    }
}

impl From<Trajectory> for TrajectoryRaw {
    fn from(t: Trajectory) -> Self {
        TrajectoryRaw { waypoints: t.waypoints }
    }
}

impl Trajectory {
    /// `waypoints` are `(time s, distance m)` pairs.
    pub fn new(waypoints: Vec<(f64, f64)>) -> Result<Self, RadioError> {
        if waypoints.is_empty() {
            return Err(RadioError::InvalidTrajectory("no waypoints".into()));
        }
        for w in waypoints.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(RadioError::InvalidTrajectory(format!(
                    "times must strictly increase ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(t, d)) = waypoints.iter().find(|(t, d)| !(*d > 0.0) || !t.is_finite() || !d.is_finite()) {
            return Err(RadioError::InvalidTrajectory(format!("bad waypoint ({t}, {d})")));
        }
        Ok(Self { waypoints })
    }

    pub fn fixed(distance_m: f64) -> Result<Self, RadioError> {
        Self::new(vec![(0.0, distance_m)])
    }

    /// Straight, constant-speed pass: `edge_m` at `t = 0`, `closest_m` at
    /// `duration_s / 2`, back to `edge_m` at `duration_s`. The hyperbolic range
    /// profile is sampled at 128 segments.
    pub fn flyover(edge_m: f64, closest_m: f64, duration_s: f64) -> Result<Self, RadioError> {
        if !(closest_m > 0.0 && edge_m >= closest_m && duration_s > 0.0) {
            return Err(RadioError::InvalidTrajectory(format!(
                "flyover needs 0 < closest ({closest_m}) <= edge ({edge_m}) and a positive duration"
            )));
        }
        const SEGMENTS: usize = 128;
        let half_track = (edge_m * edge_m - closest_m * closest_m).sqrt();
        let speed = 2.0 * half_track / duration_s;
        let waypoints = (0..=SEGMENTS)
            .map(|i| {
                let t = duration_s * i as f64 / SEGMENTS as f64;
                let along = speed * (t - duration_s / 2.0);
                (t, closest_m.hypot(along))
            })
            .collect();
        Self::new(waypoints)
    }

    /// The same profile with every waypoint `dt_s` later.
    pub fn delayed(&self, dt_s: f64) -> Self {
        Self { waypoints: self.waypoints.iter().map(|&(t, d)| (t + dt_s, d)).collect() }
    }

    pub fn waypoints(&self) -> &[(f64, f64)] {
        &self.waypoints
    }

    pub fn distance_at(&self, t: f64) -> f64 {
        let w = &self.waypoints;
        let (first, last) = (w[0], w[w.len() - 1]);
        if t <= first.0 {
            return first.1;
        }
        if t >= last.0 {
            return last.1;
        }
        let i = w.partition_point(|&(wt, _)| wt <= t);
        let ((t0, d0), (t1, d1)) = (w[i - 1], w[i]);
        d0 + (d1 - d0) * (t - t0) / (t1 - t0)
    }
}

/// Convenience wrapper matching the operation name; same as [`Trajectory::distance_at`].
pub fn distance_at(traj: &Trajectory, t: f64) -> f64 {
    traj.distance_at(t)
}
