//! Physical-layer authentication for sensors that can only read RSSI.
//!
//! An emitter proves itself by sending a secret sequence of triplets: a burst
//! of high/low transmit power bits, the channel it was sent on, and the gap
//! since the previous beacon in time units. The sensor decodes the bits from
//! RSSI polls, measures the time unit from its first gap and walks the
//! observed triplets through a [`matcher::PatternStore`]. Beacon nonces catch
//! replays, an optional shared secret gates the application layer and a
//! round-trip limit flags relays.
//!
//! [`sim`] wraps all of it in a deterministic discrete-event simulator with
//! legitimate, mutated, brute-force, replay, relay and survey emitters.
//!
//! ```
//! use beaconveil::sim::{fixtures, monte_carlo, Scenario};
//!
//! let scenario = Scenario::new(fixtures::fixtures().remove(0).1).unwrap();
//! let run = monte_carlo(&scenario, Some(1)).unwrap();
//! assert_eq!(run.outcomes[0].result.verdict.label(), "accepted");
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod band;
pub mod cli;
pub mod codec;
pub mod emitter;
pub mod matcher;
pub mod pattern;
pub mod radio;
pub mod sensor;
pub mod sim;
pub mod space;

pub use band::{BandPlan, ChannelId};
pub use pattern::{validate_pattern, PatternId, SecretPattern, Triplet, TxPattern, ValidationError};
