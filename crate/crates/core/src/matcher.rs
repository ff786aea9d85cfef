//! Incremental matching of observed triplets against the stored patterns.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::band::BandPlan;
use crate::pattern::{validate_pattern, PatternId, SecretPattern, Triplet, ValidationError};

/// Preset credentials held by a sensor, keyed by id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternStore {
    patterns: BTreeMap<PatternId, SecretPattern>,
}

impl PatternStore {
    /// Builds a store after validating every pattern against `band` and `max_tu`.
    pub fn new(
        patterns: impl IntoIterator<Item = SecretPattern>,
        band: &BandPlan,
        max_tu: u32,
    ) -> Result<Self, ValidationError> {
        let mut map = BTreeMap::new();
        for p in patterns {
            validate_pattern(&p, band, max_tu)?;
            let id = p.id;
            if map.insert(id, p).is_some() {
                return Err(ValidationError::DuplicatePatternId(id));
            }
        }
        Ok(Self { patterns: map })
    }

    pub fn get(&self, id: PatternId) -> Option<&SecretPattern> {
        self.patterns.get(&id)
    }

    /// Patterns in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = &SecretPattern> {
        self.patterns.values()
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Largest interval of any stored pattern, in TUs; 1 for an empty store.
    pub fn longest_gap_tu(&self) -> u32 {
        self.iter().flat_map(|p| p.triplets.iter().filter_map(|t| t.interval_tu)).max().unwrap_or(1)
    }

    /// Returns the id of a stored pattern with exactly these triplets.
    pub fn find(&self, triplets: &[Triplet]) -> Option<PatternId> {
        self.iter().find(|p| p.triplets == triplets).map(|p| p.id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchField {
    TxPower,
    Channel,
    Interval,
}

impl MismatchField {
    pub fn as_str(self) -> &'static str {
        match self {
            MismatchField::TxPower => "txpower",
            MismatchField::Channel => "channel",
            MismatchField::Interval => "interval",
        }
    }
}

/// The first field that disagreed with the lowest-id pattern still viable
/// when the viable set emptied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub index: usize,
    pub field: MismatchField,
}

impl Mismatch {
    /// Short form used in reports, e.g. `channel@1`.
    pub fn label(&self) -> String {
        format!("{}@{}", self.field.as_str(), self.index)
    }
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mismatch at index {}", self.field.as_str(), self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchStatus {
    InProgress,
    Accepted(PatternId),
    /// No viable pattern remains.
    Rejected(Mismatch),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("matcher already reached a terminal status")]
    Terminal,
}

/// Progress of one session against a [`PatternStore`].
///
/// Every viable pattern has consumed the same number of observations, so the
/// next index of each `(id, next_index)` pair equals [`MatcherState::consumed`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatcherState {
    viable: Vec<(PatternId, usize)>,
    consumed: usize,
    status: MatchStatus,
}

impl MatcherState {
    pub fn new(store: &PatternStore) -> Self {
        let viable: Vec<_> = store.iter().map(|p| (p.id, 0)).collect();
        let status = if viable.is_empty() {
            MatchStatus::Rejected(Mismatch { index: 0, field: MismatchField::TxPower })
        } else {
            MatchStatus::InProgress
        };
        Self { viable, consumed: 0, status }
    }

    pub fn status(&self) -> MatchStatus {
        self.status
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn viable(&self) -> &[(PatternId, usize)] {
        &self.viable
    }

    pub fn is_terminal(&self) -> bool {
        self.status != MatchStatus::InProgress
    }

    pub fn step(&self, observed: &Triplet, store: &PatternStore) -> Result<Self, MatchError> {
        match_step(self, observed, store)
    }
}

fn compare(expected: &Triplet, observed: &Triplet, index: usize) -> Option<MismatchField> {
    if expected.tx_pattern != observed.tx_pattern {
        Some(MismatchField::TxPower)
    } else if expected.channel != observed.channel {
        Some(MismatchField::Channel)
    } else if index >= 1 && expected.interval_tu != observed.interval_tu {
        Some(MismatchField::Interval)
    } else {
        None
    }
}

/// Feeds one observed triplet. Pure: the input state is left untouched.
pub fn match_step(
    state: &MatcherState,
    observed: &Triplet,
    store: &PatternStore,
) -> Result<MatcherState, MatchError> {
    if state.is_terminal() {
        return Err(MatchError::Terminal);
    }
    let index = state.consumed;
    let mut first_mismatch = None;
    let mut viable = Vec::with_capacity(state.viable.len());
    for &(id, next) in &state.viable {
        let Some(expected) = store.get(id).and_then(|p| p.triplets.get(next)) else {
            continue;
        };
        match compare(expected, observed, next) {
            None => viable.push((id, next + 1)),
            Some(field) => {
                first_mismatch.get_or_insert(Mismatch { index, field });
            }
        }
    }

    // viable stays sorted by id, so the first completed entry has the lowest id
    let completed = viable
        .iter()
        .find(|(id, next)| store.get(*id).is_some_and(|p| p.len() == *next))
        .map(|(id, _)| *id);

    let status = match (completed, viable.is_empty()) {
        (Some(id), _) => MatchStatus::Accepted(id),
        (None, true) => MatchStatus::Rejected(
            first_mismatch.unwrap_or(Mismatch { index, field: MismatchField::TxPower }),
        ),
        (None, false) => MatchStatus::InProgress,
    };
    if matches!(status, MatchStatus::Rejected(_)) {
        viable.clear();
    }
    Ok(MatcherState { viable, consumed: index + 1, status })
}

/// Runs a full observation sequence, stopping at the first terminal status.
pub fn match_sequence(observed: &[Triplet], store: &PatternStore) -> MatcherState {
    let mut state = MatcherState::new(store);
    for t in observed {
        if state.is_terminal() {
            break;
        }
        state = match_step(&state, t, store).expect("state checked non-terminal");
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::ChannelId;
    use crate::codec::parse_pattern;

    const FIG3: &str = "010@1:- 101@6:1 010@6:2 101@11:2";

    fn store_of(lines: &[&str]) -> PatternStore {
        let ps = lines.iter().enumerate().map(|(i, l)| parse_pattern(l, PatternId(i as u32)).unwrap());
        PatternStore::new(ps, &BandPlan::ieee80211_2g4(), 16).unwrap()
    }

    fn fig3_triplets() -> Vec<Triplet> {
        parse_pattern(FIG3, PatternId(0)).unwrap().triplets
    }

    #[test]
    fn correct_sequence_is_accepted() {
        let store = store_of(&[FIG3]);
        let mut state = MatcherState::new(&store);
        for (i, t) in fig3_triplets().iter().enumerate() {
            assert_eq!(state.status(), MatchStatus::InProgress, "step {i}");
            state = state.step(t, &store).unwrap();
        }
        assert_eq!(state.status(), MatchStatus::Accepted(PatternId(0)));
        assert_eq!(state.consumed(), 4);
    }

    #[test]
    fn wrong_txpower_at_second_triplet() {
        let store = store_of(&[FIG3]);
        let mut obs = fig3_triplets();
        obs[1].tx_pattern = "010".parse().unwrap();
        let state = match_sequence(&obs, &store);
        assert_eq!(state.consumed(), 2);
        assert_eq!(
            state.status(),
            MatchStatus::Rejected(Mismatch { index: 1, field: MismatchField::TxPower })
        );
        assert!(state.viable().is_empty());
    }

    #[test]
    fn wrong_channel_and_interval() {
        let store = store_of(&[FIG3]);
        let mut obs = fig3_triplets();
        obs[1].channel = ChannelId::new(9).unwrap();
        let MatchStatus::Rejected(m) = match_sequence(&obs, &store).status() else { panic!() };
        assert_eq!(m.label(), "channel@1");

        let mut obs = fig3_triplets();
        obs[2].interval_tu = Some(1);
        let state = match_sequence(&obs, &store);
        assert_eq!(state.consumed(), 3);
        let MatchStatus::Rejected(m) = state.status() else { panic!() };
        assert_eq!(m.to_string(), "interval mismatch at index 2");
    }

    #[test]
    fn first_interval_is_not_compared() {
        let store = store_of(&[FIG3]);
        let mut obs = fig3_triplets();
        obs[0].interval_tu = Some(5);
        assert_eq!(match_sequence(&obs, &store).status(), MatchStatus::Accepted(PatternId(0)));
    }

    #[test]
    fn stepping_after_terminal_is_an_error() {
        let store = store_of(&[FIG3]);
        let state = match_sequence(&fig3_triplets(), &store);
        assert_eq!(state.step(&fig3_triplets()[0], &store), Err(MatchError::Terminal));
    }

    #[test]
    fn multi_pattern_store_keeps_other_candidates_alive() {
        let store = store_of(&[FIG3, "010@1:- 101@6:1 010@6:3 101@11:2"]);
        let mut obs = fig3_triplets();
        obs[2].interval_tu = Some(3);
        let state = match_sequence(&obs, &store);
        assert_eq!(state.status(), MatchStatus::Accepted(PatternId(1)));
    }

    #[test]
    fn shortest_completed_pattern_accepts_first_and_ties_go_to_lowest_id() {
        // pattern 1 is a prefix of pattern 0
        let store = store_of(&[FIG3, "010@1:- 101@6:1"]);
        let state = match_sequence(&fig3_triplets(), &store);
        assert_eq!(state.status(), MatchStatus::Accepted(PatternId(1)));
        assert_eq!(state.consumed(), 2);

        let ps = [FIG3, FIG3]
            .iter()
            .enumerate()
            .map(|(i, l)| parse_pattern(l, PatternId(10 - i as u32)).unwrap());
        let store = PatternStore::new(ps, &BandPlan::ieee80211_2g4(), 16).unwrap();
        assert_eq!(match_sequence(&fig3_triplets(), &store).status(), MatchStatus::Accepted(PatternId(9)));
    }

    #[test]
    fn store_rejects_duplicates_and_invalid_patterns() {
        let band = BandPlan::ieee80211_2g4();
        let p = parse_pattern(FIG3, PatternId(0)).unwrap();
        assert_eq!(
            PatternStore::new([p.clone(), p.clone()], &band, 16),
            Err(ValidationError::DuplicatePatternId(PatternId(0)))
        );
        assert!(PatternStore::new([p], &band, 1).is_err());
    }
}
