//! Channel plans that a pattern hops across.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pattern::ValidationError;

/// A 1-based channel index inside a [`BandPlan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u16", into = "u16")]
pub struct ChannelId(u16);

impl ChannelId {
    /// Returns `None` for index 0; channel numbering starts at 1.
    pub const fn new(index: u16) -> Option<Self> {
        if index == 0 {
            None
        } else {
            Some(Self(index))
        }
    }

    pub const fn get(self) -> u16 {
        self.0
    }
}

impl TryFrom<u16> for ChannelId {
    type Error = String;

    fn try_from(value: u16) -> Result<Self, Self::Error> {
        ChannelId::new(value).ok_or_else(|| "channel index must be positive".to_string())
    }
}

impl From<ChannelId> for u16 {
    fn from(value: ChannelId) -> Self {
        value.0
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Channel count, first centre frequency and spacing of a band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BandPlanRaw", into = "BandPlanRaw")]
pub struct BandPlan {
    name: String,
    channel_count: u16,
    base_freq_mhz: f64,
    spacing_mhz: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BandPlanRaw {
    name: String,
    channel_count: u16,
    base_freq: f64,
    spacing: f64,
}

impl TryFrom<BandPlanRaw> for BandPlan {
    type Error = ValidationError;

    fn try_from(raw: BandPlanRaw) -> Result<Self, Self::Error> {
        BandPlan::new(raw.name, raw.channel_count, raw.base_freq, raw.spacing)
    }
}

impl From<BandPlan> for BandPlanRaw {
    fn from(b: BandPlan) -> Self {
        BandPlanRaw {
            name: b.name,
            channel_count: b.channel_count,
            base_freq: b.base_freq_mhz,
            spacing: b.spacing_mhz,
        }
    }
}

impl BandPlan {
    pub fn new(
        name: impl Into<String>,
        channel_count: u16,
        base_freq_mhz: f64,
        spacing_mhz: f64,
    ) -> Result<Self, ValidationError> {
        if channel_count == 0 {
            return Err(ValidationError::InvalidBand("channel_count must be at least 1".into()));
        }
        if !(spacing_mhz > 0.0) || !spacing_mhz.is_finite() {
            return Err(ValidationError::InvalidBand("spacing must be positive".into()));
        }
        if !base_freq_mhz.is_finite() {
            return Err(ValidationError::InvalidBand("base_freq must be finite".into()));
        }
        Ok(Self {
            name: name.into(),
            channel_count,
            base_freq_mhz,
            spacing_mhz,
        })
    }

    /// 802.11b/g 2.4 GHz plan: 14 channels, 5 MHz apart, channel 1 at 2412 MHz.
    pub fn ieee80211_2g4() -> Self {
        Self::new("802.11bg-2.4GHz", 14, 2412.0, 5.0).expect("static plan is valid")
    }

    /// Link-16 L-band plan spanning 969-1206 MHz with 3 MHz spacing (80 channels).
    pub fn link16_l_band() -> Self {
        Self::new("link16-L", 80, 969.0, 3.0).expect("static plan is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn channel_count(&self) -> u16 {
        self.channel_count
    }

    pub fn base_freq_mhz(&self) -> f64 {
        self.base_freq_mhz
    }

    pub fn spacing_mhz(&self) -> f64 {
        self.spacing_mhz
    }

    pub fn contains(&self, ch: ChannelId) -> bool {
        ch.get() <= self.channel_count
    }

    pub fn center_freq_mhz(&self, ch: ChannelId) -> Option<f64> {
        self.contains(ch)
            .then(|| self.base_freq_mhz + f64::from(ch.get() - 1) * self.spacing_mhz)
    }

    pub fn channels(&self) -> impl Iterator<Item = ChannelId> {
        (1..=self.channel_count).map(ChannelId)
    }
}

impl Default for BandPlan {
    fn default() -> Self {
        Self::ieee80211_2g4()
    }
}
