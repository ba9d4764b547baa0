mod common;

use cards_core::commonground::snapshot_at;
use cards_core::corpus::{label_followup, parse_transcript, split, Label};
use cards_core::engine::GameConfig;
use cards_core::features::{AddresseeRule, ContextFeatures};
use cards_core::simulator::{generate_game, GeneratorPolicy};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn split_is_a_seeded_partition(n in 1usize..300, ratio in 0.05f64..0.95, seed in any::<u64>()) {
        let items: Vec<usize> = (0..n).collect();
        let (train, test) = split(&items, ratio, seed).unwrap();
        prop_assert_eq!(train.len(), (ratio * n as f64).round() as usize);
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort();
        prop_assert_eq!(all, items.clone());
        prop_assert_eq!(split(&items, ratio, seed).unwrap(), (train, test));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn snapshots_only_see_the_past(seed in any::<u64>()) {
        let g = generate_game(&GameConfig::default(), &GeneratorPolicy::default(), seed).unwrap();
        let last = g.transcript.events.last().unwrap().seq;
        for cut in [1, last / 3, last / 2, last] {
            let prefix: Vec<_> = g.annotations.iter().filter(|a| a.seq <= cut).cloned().collect();
            prop_assert_eq!(snapshot_at(&g.annotations, cut), snapshot_at(&prefix, u64::MAX));
        }
    }

    #[test]
    fn transcripts_round_trip_through_jsonl(seed in any::<u64>()) {
        let g = generate_game(&GameConfig::default(), &GeneratorPolicy::default(), seed).unwrap();
        let text = g.transcript.to_jsonl();
        let back = parse_transcript(&g.transcript.id, &text).unwrap();
        prop_assert_eq!(&back, &g.transcript);
        prop_assert_eq!(back.to_jsonl(), text);
    }
}

#[test]
fn motivating_exchange_reads_as_a_request() {
    let ex = common::motivating_exchange();
    let cg = snapshot_at(&ex.annotations, ex.locative_seq);
    let f = ContextFeatures::compute(&cg, cards_core::card::card("5H"), cards_core::engine::PlayerId::P1, AddresseeRule::Mirror);
    assert_eq!(f.full_hands, 1.0);
    assert_eq!(f.explicit_goal, 1.0);
    let label = label_followup(&ex.transcript, ex.locative_seq, cards_core::card::card("5H"), 20).unwrap();
    assert_eq!(label, Label::Positive);
}
