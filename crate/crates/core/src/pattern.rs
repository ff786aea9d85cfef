//! Covert credentials: txpower bit patterns, triplets and secret patterns.
//!
//! A [`SecretPattern`] is an ordered list of [`Triplet`]s. Each triplet carries
//! the txpower bits sent right after a beacon, the channel of that beacon, and
//! the gap to the previous beacon in time units (TU). The first triplet has no
//! gap and the second is always exactly 1 TU, since the sensor defines the TU
//! as the first measured gap.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::band::{BandPlan, ChannelId};

/// Default upper bound on a triplet's interval, in TUs.
pub const DEFAULT_MAX_TU: u32 = 16;

/// Minimum and maximum txpower bits per triplet for a stored credential.
pub const MIN_PATTERN_WIDTH: usize = 2;
pub const MAX_PATTERN_WIDTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("pattern length L < 2 (got {len})")]
    BadLength { len: usize },
    #[error("first triplet must not carry an interval")]
    FirstIntervalPresent,
    #[error("second interval must be 1 TU (got {found:?})")]
    SecondIntervalNotOne { found: Option<u32> },
    #[error("triplet {index} is missing its interval")]
    MissingInterval { index: usize },
    #[error("triplet {index} has {found} txpower bits, expected {expected}")]
    MixedWidth { index: usize, expected: usize, found: usize },
    #[error("txpower pattern width {width} outside {MIN_PATTERN_WIDTH}..={MAX_PATTERN_WIDTH}")]
    BadWidth { width: usize },
    #[error("all-equal bits in triplet {index}")]
    AllEqualBits { index: usize },
    #[error("channel {channel} of triplet {index} is outside the {channel_count}-channel band")]
    ChannelOutOfBand { index: usize, channel: ChannelId, channel_count: u16 },
    #[error("interval {interval} TU of triplet {index} is outside 1..={max_tu}")]
    IntervalOutOfRange { index: usize, interval: u32, max_tu: u32 },
    #[error("invalid band plan: {0}")]
    InvalidBand(String),
    #[error("invalid txpower bits: {0}")]
    InvalidBits(String),
    #[error("duplicate pattern id {0}")]
    DuplicatePatternId(PatternId),
}

/// High/low txpower levels of one triplet, first slot first.
///
/// Any width in 1..=64 can be represented so that adversarial or enumerated
/// candidates fit the same type; stored credentials are further restricted by
/// [`validate_pattern`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TxPattern {
    bits: u64,
    width: u8,
}

impl TxPattern {
    /// `bits` holds the first slot in its most significant used position.
    pub fn new(bits: u64, width: usize) -> Result<Self, ValidationError> {
        if width == 0 || width > MAX_PATTERN_WIDTH {
            return Err(ValidationError::InvalidBits(format!("width {width} outside 1..=64")));
        }
        if width < 64 && bits >> width != 0 {
            return Err(ValidationError::InvalidBits(format!(
                "value {bits:#x} does not fit in {width} bits"
            )));
        }
        Ok(Self { bits, width: width as u8 })
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self, ValidationError> {
        let value = bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b));
        Self::new(value, bits.len())
    }

    pub fn width(&self) -> usize {
        usize::from(self.width)
    }

    pub fn value(&self) -> u64 {
        self.bits
    }

    /// Bit carried by slot `i` (0 = first slot after the beacon).
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.width(), "bit index {i} out of range");
        (self.bits >> (self.width() - 1 - i)) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width()).map(move |i| self.bit(i))
    }

    pub fn has_both_symbols(&self) -> bool {
        let ones = self.bits.count_ones() as usize;
        ones != 0 && ones != self.width()
    }

    pub fn with_flipped(&self, i: usize) -> Self {
        assert!(i < self.width(), "bit index {i} out of range");
        Self {
            bits: self.bits ^ (1 << (self.width() - 1 - i)),
            width: self.width,
        }
    }
}

impl fmt::Display for TxPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for TxPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TxPattern({self})")
    }
}

impl FromStr for TxPattern {
    type Err = ValidationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ValidationError::InvalidBits(format!("unexpected {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_bools(&bits)
    }
}

impl TryFrom<String> for TxPattern {
    type Error = ValidationError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<TxPattern> for String {
    fn from(value: TxPattern) -> Self {
        value.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triplet {
    pub tx_pattern: TxPattern,
    pub channel: ChannelId,
    /// Gap to the previous beacon in TUs; `None` only for the first triplet.
    pub interval_tu: Option<u32>,
}

impl Triplet {
    pub fn new(tx_pattern: TxPattern, channel: ChannelId, interval_tu: Option<u32>) -> Self {
        Self { tx_pattern, channel, interval_tu }
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.interval_tu {
            Some(tu) => write!(f, "{}@{}:{}", self.tx_pattern, self.channel, tu),
            None => write!(f, "{}@{}:-", self.tx_pattern, self.channel),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternId(pub u32);

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An ordered triplet sequence stored in the sensor before deployment.
///
/// Construction does not validate; call [`validate_pattern`] before storing
/// a pattern as a credential.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SecretPattern {
    pub id: PatternId,
    pub triplets: Vec<Triplet>,
}

impl SecretPattern {
    pub fn new(id: PatternId, triplets: Vec<Triplet>) -> Self {
        Self { id, triplets }
    }

    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    /// Txpower bits per triplet, taken from the first triplet.
    pub fn width(&self) -> usize {
        self.triplets.first().map_or(0, |t| t.tx_pattern.width())
    }

    pub fn channels(&self) -> impl Iterator<Item = ChannelId> + '_ {
        self.triplets.iter().map(|t| t.channel)
    }
}

/// Space-separated triplets, as in the pattern grammar.
impl fmt::Display for SecretPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.triplets.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Band-independent checks: lengths, interval shape, widths and bit content.
pub fn check_structure(p: &SecretPattern) -> Result<(), ValidationError> {
    check_shape(p)?;
    let width = p.width();
    if !(MIN_PATTERN_WIDTH..=MAX_PATTERN_WIDTH).contains(&width) {
        return Err(ValidationError::BadWidth { width });
    }
    if let Some(index) = p.triplets.iter().position(|t| !t.tx_pattern.has_both_symbols()) {
        return Err(ValidationError::AllEqualBits { index });
    }
    Ok(())
}

/// The subset of [`check_structure`] an emitter needs to lay a sequence out in time.
pub(crate) fn check_shape(p: &SecretPattern) -> Result<(), ValidationError> {
    let len = p.triplets.len();
    if len < 2 {
        return Err(ValidationError::BadLength { len });
    }
    if p.triplets[0].interval_tu.is_some() {
        return Err(ValidationError::FirstIntervalPresent);
    }
    if p.triplets[1].interval_tu != Some(1) {
        return Err(ValidationError::SecondIntervalNotOne { found: p.triplets[1].interval_tu });
    }
    let width = p.width();
    for (index, t) in p.triplets.iter().enumerate() {
        if t.tx_pattern.width() != width {
            return Err(ValidationError::MixedWidth {
                index,
                expected: width,
                found: t.tx_pattern.width(),
            });
        }
        if index >= 2 {
            match t.interval_tu {
                None => return Err(ValidationError::MissingInterval { index }),
                Some(0) => {
                    return Err(ValidationError::IntervalOutOfRange { index, interval: 0, max_tu: u32::MAX })
                }
                Some(_) => {}
            }
        }
    }
    Ok(())
}

/// Full credential validation against a band plan and interval bound.
pub fn validate_pattern(p: &SecretPattern, band: &BandPlan, max_tu: u32) -> Result<(), ValidationError> {
    check_structure(p)?;
    for (index, t) in p.triplets.iter().enumerate() {
        if !band.contains(t.channel) {
            return Err(ValidationError::ChannelOutOfBand {
                index,
                channel: t.channel,
                channel_count: band.channel_count(),
            });
        }
        if let Some(interval) = t.interval_tu {
            if interval < 1 || interval > max_tu {
                return Err(ValidationError::IntervalOutOfRange { index, interval, max_tu });
            }
        }
    }
    Ok(())
}
