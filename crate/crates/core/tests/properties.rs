mod common;

use beaconveil::band::ChannelId;
use beaconveil::emitter::{mutate, random_pattern, Mutation};
use beaconveil::matcher::{match_sequence, MatchStatus, PatternStore};
use beaconveil::sensor::{quantize_interval, Verdict};
use beaconveil::sim::{fixtures, trial_seed, Scenario};
use beaconveil::BandPlan;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn base() -> Scenario {
    Scenario::new(fixtures::fixtures().remove(0).1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn single_field_corruption_is_reported_where_it_happens(
        seed in any::<u64>(),
        l in 3usize..=6,
        field in 0u8..3,
        pick in any::<u64>(),
    ) {
        let band = BandPlan::ieee80211_2g4();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_pattern(&mut rng, 3, l, &band, 8).unwrap();
        let store = PatternStore::new([p.clone()], &band, 8).unwrap();
        let triplet = match field {
            2 => 2 + (pick as usize) % (l - 2),
            _ => (pick as usize) % l,
        };
        let m = match field {
            0 => Mutation::FlipTxBit { triplet, bit: (pick >> 8) as usize % 3 },
            1 => {
                let ch = p.triplets[triplet].channel.get();
                Mutation::WrongChannel { triplet, channel: ChannelId::new(ch % band.channel_count() + 1).unwrap() }
            }
            _ => {
                let tu = p.triplets[triplet].interval_tu.unwrap();
                Mutation::WrongInterval { triplet, tu: tu % 8 + 1 }
            }
        };
        let Ok(bad) = mutate(&p, m) else { return Ok(()) };
        let r = common::play_with_store(&base(), &store, &bad, seed);
        let name = ["txpower", "channel", "interval"][field as usize];
        prop_assert_eq!(r.verdict.label(), format!("{name}@{triplet}"));
    }

    #[test]
    fn matcher_accepts_exactly_the_stored_sequences(seed in any::<u64>(), count in 1usize..5) {
        let band = common::band(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let stored: Vec<_> = (0..count).map(|_| random_pattern(&mut rng, 2, 3, &band, 2).unwrap()).collect();
        let Ok(store) = PatternStore::new(stored.clone(), &band, 2) else { return Ok(()) };
        for candidate in common::all_candidates(2, 3, 2, 2) {
            let state = match_sequence(&candidate.triplets, &store);
            let hit = store.iter().find(|s| s.triplets == candidate.triplets).map(|s| s.id);
            match hit {
                Some(id) => prop_assert_eq!(state.status(), MatchStatus::Accepted(id)),
                None => prop_assert!(!matches!(state.status(), MatchStatus::Accepted(_))),
            }
        }
    }

    #[test]
    fn quantization_recovers_whole_units(k in 1u32..64, tu in 0.05f64..50.0, jitter in -0.099f64..0.099) {
        let raw = (f64::from(k) + jitter) * tu;
        prop_assert_eq!(quantize_interval(raw, tu, 0.1), Some(k));
    }

    #[test]
    fn quantization_rejects_half_units(k in 1u32..64, tu in 0.05f64..50.0, off in 0.11f64..0.5) {
        let raw = (f64::from(k) + off) * tu;
        prop_assert_eq!(quantize_interval(raw, tu, 0.1), None);
    }

    #[test]
    fn trial_seeds_depend_on_both_inputs(base in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        prop_assume!(a != b);
        prop_assert_ne!(trial_seed(base, a), trial_seed(base, b));
    }

    #[test]
    fn noiseless_legit_sessions_always_authenticate(seed in any::<u64>(), n in 2usize..=6, l in 2usize..=6) {
        let band = BandPlan::ieee80211_2g4();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_pattern(&mut rng, n, l, &band, 16).unwrap();
        let store = PatternStore::new([p.clone()], &band, 16).unwrap();
        let mut s = base();
        s.config.sensor.n = n;
        let r = common::play_with_store(&s, &store, &p, seed);
        prop_assert!(matches!(r.verdict, Verdict::Accepted(_)), "{}", r.verdict.label());
    }
}
