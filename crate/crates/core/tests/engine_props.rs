mod common;

use cards_core::card::{Card, CardSet, Suit};
use cards_core::engine::{apply_action, new_game, Action, Direction, GameConfig, PlayerId};
use cards_core::straights::winning_straight;
use common::{is_win_by_definition, run_engine_sequence, EngineTally};
use proptest::prelude::*;

fn hand_strategy() -> impl Strategy<Value = CardSet> {
    proptest::collection::btree_set(0u32..52, 0..=3)
        .prop_map(|ix| ix.into_iter().map(|i| Card::from_index(i).unwrap()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_sequences_keep_invariants(seed in any::<u64>(), len in 1usize..120) {
        let mut tally = EngineTally::default();
        prop_assert_eq!(run_engine_sequence(seed, len, &mut tally), Ok(()));
    }

    #[test]
    fn win_check_matches_definition(h1 in hand_strategy(), h2 in hand_strategy()) {
        prop_assume!(h1.is_disjoint(h2));
        prop_assert_eq!(winning_straight(h1, h2).is_some(), is_win_by_definition(h1, h2));
    }

    #[test]
    fn pure_and_in_place_application_agree(seed in any::<u64>(), dirs in proptest::collection::vec(0usize..4, 0..30)) {
        let config = GameConfig { width: 6, height: 5, ..GameConfig::default() };
        let mut state = new_game(&config, seed).unwrap();
        for d in dirs {
            let action = Action::Move(Direction::ALL[d]);
            let pure = apply_action(&state, PlayerId::P1, &action);
            let mut copy = state.clone();
            let in_place = copy.apply(PlayerId::P1, &action);
            prop_assert_eq!(pure.is_ok(), in_place.is_ok());
            if let Ok(next) = pure {
                prop_assert_eq!(&next, &copy);
                state = next;
            }
        }
    }
}

#[test]
fn some_sequences_reach_a_win() {
    let mut tally = EngineTally::default();
    for seed in 0..400 {
        run_engine_sequence(seed, 200, &mut tally).unwrap();
    }
    assert!(tally.wins > 0, "{tally:?}");
    assert!(tally.rejected > 0 && tally.rejected < tally.steps, "{tally:?}");
}

#[test]
fn every_straight_splits_into_wins() {
    for suit in Suit::ALL {
        for lo in 1..=8u8 {
            let run: Vec<Card> = (lo..lo + 6).map(|r| Card::new(suit, r).unwrap()).collect();
            let h1: CardSet = run[..3].iter().copied().collect();
            let h2: CardSet = run[3..].iter().copied().collect();
            assert!(winning_straight(h1, h2).is_some());
            assert!(winning_straight(h2, h1).is_some());
        }
    }
}
