use std::collections::BTreeMap;

use cards_core::commonground::{snapshot_at, Annotation};
use cards_core::corpus::{
    extract_cards, load_corpus, replay, tag_command_type, CommandType, EventKind, LocativeInstance, Transcript,
};
use cards_core::engine::GameConfig;
use cards_core::features::{AddresseeRule, ContextFeatures};
use cards_core::simulator::{generate_corpus, generate_game, generate_instances, FollowupRule, GeneratedGame, GeneratorPolicy};

fn policy(rule: &str, noise: f64) -> GeneratorPolicy {
    GeneratorPolicy { followup_rule: rule.parse().unwrap(), noise_eps: noise, ..GeneratorPolicy::default() }
}

fn games(n: usize, seed: u64, p: &GeneratorPolicy) -> Vec<GeneratedGame> {
    let config = GameConfig::default();
    let mut seeds = 0..n as u64;
    std::iter::from_fn(|| seeds.next().map(|i| generate_game(&config, p, seed * 1000 + i).unwrap())).collect()
}

fn features_of(g: &GeneratedGame, inst: &LocativeInstance) -> ContextFeatures {
    let cg = snapshot_at(&g.annotations, inst.seq);
    ContextFeatures::compute(&cg, inst.mentioned_card, inst.speaker, AddresseeRule::Mirror)
}

#[test]
fn same_inputs_same_game() {
    let p = GeneratorPolicy::default();
    let a = generate_game(&GameConfig::default(), &p, 42).unwrap();
    let b = generate_game(&GameConfig::default(), &p, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.transcript.to_jsonl(), b.transcript.to_jsonl());
}

#[test]
fn noiseless_labels_follow_the_rule() {
    let p = policy("full_hands ∧ explicit_goal", 0.0);
    let mut n = 0;
    for g in games(40, 1, &p) {
        for inst in &g.instances {
            let f = features_of(&g, inst);
            assert_eq!(inst.label.is_positive(), p.followup_rule.eval(&f), "{}", inst.id());
            n += 1;
        }
    }
    assert!(n > 20, "only {n} instances");
}

#[test]
fn noise_flips_about_the_requested_share() {
    let p = policy(cards_core::simulator::DEFAULT_RULE, 0.1);
    let gs = generate_instances(&GameConfig::default(), &p, 3, 2000).unwrap();
    let mut n = 0;
    let mut disagree = 0;
    for g in &gs {
        for inst in &g.instances {
            n += 1;
            if inst.label.is_positive() != p.followup_rule.eval(&features_of(g, inst)) {
                disagree += 1;
            }
        }
    }
    assert_eq!(n, 2000);
    let rate = disagree as f64 / n as f64;
    assert!((0.08..=0.12).contains(&rate), "disagreement {rate}");
}

#[test]
fn fifty_games_give_at_least_fifty_instances() {
    let n: usize = games(50, 4, &GeneratorPolicy::default()).iter().map(|g| g.instances.len()).sum();
    assert!(n >= 50, "{n}");
}

#[test]
fn labels_and_features_match_the_generator_decisions() {
    for g in games(30, 5, &GeneratorPolicy::default()) {
        assert_eq!(g.instances.len(), g.decisions.len(), "{}", g.transcript.id);
        for (inst, d) in g.instances.iter().zip(&g.decisions) {
            assert_eq!((inst.seq, inst.mentioned_card, inst.speaker), (d.seq, d.card, d.speaker));
            assert_eq!(features_of(&g, inst), d.features);
            assert_eq!(inst.label.is_positive(), d.followed_up());
        }
    }
}

#[test]
fn every_game_replays_legally() {
    for g in games(30, 6, &GeneratorPolicy::default()) {
        let end = replay(&g.transcript).unwrap_or_else(|e| panic!("{}: {e}", g.transcript.id));
        assert_eq!(end.event_log, g.transcript.events);
    }
}

#[test]
fn generated_locatives_are_tagged_as_locatives() {
    for g in games(30, 7, &GeneratorPolicy::default()) {
        for d in &g.decisions {
            let text = g.transcript.event(d.seq).and_then(|e| e.utterance()).unwrap();
            assert_eq!(tag_command_type(text), CommandType::Locative, "{text}");
            assert_eq!(extract_cards(text), vec![d.card], "{text}");
        }
    }
}

fn prefix(t: &Transcript, seq: u64) -> Transcript {
    let end = t.position(seq).unwrap();
    Transcript::new(t.id.clone(), t.events[..=end].to_vec())
}

#[test]
fn reported_hands_are_true() {
    for g in games(15, 8, &GeneratorPolicy::default()) {
        for ev in &g.annotations {
            if let Annotation::HandIs { player, cards } = &ev.fact {
                let state = replay(&prefix(&g.transcript, ev.seq)).unwrap();
                assert_eq!(state.player(*player).hand, *cards, "{} seq {}", g.transcript.id, ev.seq);
            }
        }
    }
}

#[test]
fn annotations_point_at_utterances() {
    for g in games(15, 9, &GeneratorPolicy::default()) {
        for ev in &g.annotations {
            let e = g.transcript.event(ev.seq).unwrap();
            assert!(matches!(e.kind, EventKind::Utterance { .. }), "seq {}", ev.seq);
            assert_eq!(e.actor.player(), Some(ev.asserter));
        }
    }
}

#[test]
fn corpus_on_disk_round_trips_and_is_deterministic() {
    let config = GameConfig::default();
    let p = GeneratorPolicy::default();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let manifest = generate_corpus(6, &config, &p, 11, a.path()).unwrap();
    generate_corpus(6, &config, &p, 11, b.path()).unwrap();
    assert_eq!(read_tree(a.path()), read_tree(b.path()));

    let (loaded, corpus) = load_corpus(a.path()).unwrap();
    assert_eq!(loaded, manifest);
    assert_eq!(corpus.len(), 6);
    for (entry, game) in manifest.games.iter().zip(&corpus) {
        let fresh = generate_game(&config, &p, entry.seed).unwrap().with_id(&entry.id);
        assert_eq!(game.transcript, fresh.transcript);
        assert_eq!(game.annotations, fresh.annotations);
        assert_eq!(game.instances, fresh.instances);
    }
}

#[test]
fn different_master_seeds_differ() {
    let config = GameConfig::default();
    let p = GeneratorPolicy::default();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    generate_corpus(3, &config, &p, 1, a.path()).unwrap();
    generate_corpus(3, &config, &p, 2, b.path()).unwrap();
    assert_ne!(read_tree(a.path()), read_tree(b.path()));
}

#[test]
fn instance_budget_is_exact() {
    let gs = generate_instances(&GameConfig::default(), &GeneratorPolicy::default(), 12, 137).unwrap();
    assert_eq!(gs.iter().map(|g| g.instances.len()).sum::<usize>(), 137);
}

#[test]
fn policy_json_defaults_and_validation() {
    let p: GeneratorPolicy =
        serde_json::from_str(r#"{"locative_rate": 0.05, "followup_rule": "full_hands", "noise_eps": 0.2, "seed": 3}"#).unwrap();
    assert_eq!(p.followup_rule, FollowupRule::FullHands);
    assert_eq!(p.window, GeneratorPolicy::default().window);
    let bad = GeneratorPolicy { noise_eps: 1.5, ..GeneratorPolicy::default() };
    assert!(generate_game(&GameConfig::default(), &bad, 0).is_err());
}

fn read_tree(dir: &std::path::Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}
