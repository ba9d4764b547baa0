//! Independent oracles shared by the property tests and the acceptance run.
#![allow(dead_code)]

use std::collections::VecDeque;

use cards_core::card::{card, cards, Card, CardSet, Suit};
use cards_core::commonground::{Annotation, AnnotationEvent, CardStatus, Place};
use cards_core::corpus::{Actor, EventKind, Transcript, TranscriptEvent};
use cards_core::engine::{check_win, new_game, Action, Coord, Direction, GameConfig, GameState, PlayerId, HAND_CAPACITY};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Engine: random action sequences with invariant checks

/// Six same-suit cards with consecutive ranks split three and three.
pub fn is_win_by_definition(h1: CardSet, h2: CardSet) -> bool {
    if h1.len() != 3 || h2.len() != 3 || !h1.is_disjoint(h2) {
        return false;
    }
    let all: Vec<Card> = h1.union(h2).iter().collect();
    let suit = all[0].suit();
    let mut ranks: Vec<u8> = all.iter().map(|c| c.rank()).collect();
    ranks.sort();
    all.iter().all(|c| c.suit() == suit) && ranks.windows(2).all(|w| w[1] == w[0] + 1)
}

fn random_config(rng: &mut ChaCha8Rng) -> GameConfig {
    let width = rng.gen_range(4..=8);
    let height = rng.gen_range(4..=6);
    let deck = if rng.gen_bool(0.5) {
        Card::full_deck()
    } else {
        // A crowded straight-friendly deck so wins actually happen.
        let suit = *Suit::ALL.choose(rng).unwrap();
        let lo = rng.gen_range(1..=8u8);
        let mut d: Vec<Card> = (lo..lo + 6).map(|r| Card::new(suit, r).unwrap()).collect();
        d.extend(Card::full_deck().into_iter().filter(|c| c.suit() != suit).take([0, 0, 1, 3][rng.gen_range(0..4)]));
        d
    };
    let walls = rng.gen_range(0..8);
    GameConfig {
        width,
        height,
        deck,
        move_budget: rng.gen_range(5..120),
        charge_bumps: rng.gen_bool(0.7),
        ..GameConfig::default()
    }
    .with_random_walls(walls, 0.5, rng.gen())
}

fn toward_nearest_card(state: &GameState, from: Coord) -> Option<Direction> {
    let target = state.board.placements.keys().min_by_key(|c| c.manhattan(from))?;
    Direction::ALL.into_iter().min_by_key(|d| from.step(*d).manhattan(*target))
}

fn random_action(state: &GameState, actor: PlayerId, rng: &mut ChaCha8Rng) -> Action {
    let me = state.player(actor);
    let here = state.board.cards_at(me.pos);
    let random_move = |rng: &mut ChaCha8Rng| Action::Move(*Direction::ALL.choose(rng).unwrap());
    match rng.gen_range(0..10) {
        0..=2 => random_move(rng),
        3..=6 if !here.is_empty() => Action::Pickup(*here.choose(rng).unwrap()),
        3..=6 => toward_nearest_card(state, me.pos).map_or_else(|| random_move(rng), Action::Move),
        7 if !me.hand.is_empty() => Action::Drop(*me.hand.to_vec().choose(rng).unwrap()),
        8 => Action::Utter("i have 3h".into()),
        // Usually illegal: a card that is most likely elsewhere.
        _ => {
            let c = *state.config.deck.choose(rng).unwrap();
            if rng.gen_bool(0.5) { Action::Pickup(c) } else { Action::Drop(c) }
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct EngineTally {
    pub steps: usize,
    pub rejected: usize,
    pub wins: usize,
}

/// Plays `len` random actions from a random board and checks every invariant after
/// each one. Returns a description of the first violation.
pub fn run_engine_sequence(seed: u64, len: usize, tally: &mut EngineTally) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = random_config(&mut rng);
    let mut state = new_game(&config, rng.gen()).map_err(|e| e.to_string())?;
    let mut deck = config.deck.clone();
    deck.sort();
    for step in 0..len {
        let actor = if rng.gen_bool(0.5) { PlayerId::P1 } else { PlayerId::P2 };
        let action = random_action(&state, actor, &mut rng);
        let before = state.clone();
        tally.steps += 1;
        match state.apply(actor, &action) {
            Ok(seq) => {
                if seq != before.last_seq() + 1 || state.event_log.len() != before.event_log.len() + 1 {
                    return Err(format!("step {step}: event log did not grow by one"));
                }
            }
            Err(_) => {
                tally.rejected += 1;
                if state != before {
                    return Err(format!("step {step}: rejected {action:?} changed the state"));
                }
            }
        }
        if state.all_cards() != deck {
            return Err(format!("step {step}: cards not conserved after {action:?}"));
        }
        for p in &state.players {
            if p.hand.len() > HAND_CAPACITY {
                return Err(format!("step {step}: {} holds {} cards", p.id, p.hand.len()));
            }
            if p.moves_used > state.move_budget {
                return Err(format!("step {step}: {} over budget", p.id));
            }
            if !state.board.in_bounds(p.pos) {
                return Err(format!("step {step}: {} off the board", p.id));
            }
        }
        let [p1, p2] = &state.players;
        let expected = is_win_by_definition(p1.hand, p2.hand);
        match check_win(&state) {
            Some(s) if !expected || s.cards() != p1.hand.union(p2.hand) => {
                return Err(format!("step {step}: unsound win {s} for {} / {}", p1.hand, p2.hand));
            }
            None if expected => return Err(format!("step {step}: missed win {} / {}", p1.hand, p2.hand)),
            Some(_) => tally.wins += 1,
            None => {}
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Edit distance: exhaustive shortest pickup/drop sequences

/// Hearts then spades, A..K each.
pub const UNIVERSE: usize = 26;

fn universe_card(i: usize) -> Card {
    let suit = if i < 13 { Suit::Hearts } else { Suit::Spades };
    Card::new(suit, (i % 13) as u8 + 1).unwrap()
}

pub fn universe_index(c: Card) -> Option<usize> {
    match c.suit() {
        Suit::Hearts => Some(c.rank() as usize - 1),
        Suit::Spades => Some(13 + c.rank() as usize - 1),
        _ => None,
    }
}

pub fn to_cards(mask: u32) -> CardSet {
    (0..UNIVERSE).filter(|i| mask >> i & 1 == 1).map(universe_card).collect()
}

/// Distances from every hand pair over the universe to the nearest winning
/// pair, where one action picks up or drops a single card. Pickups are undone by
/// drops and vice versa, so a BFS outward from the winning pairs gives the
/// forward shortest path length.
pub struct EditOracle {
    binom: [[u64; UNIVERSE + 1]; UNIVERSE + 1],
    offsets: [[u64; 4]; 4],
    dist: Vec<u8>,
}

impl EditOracle {
    pub fn build() -> EditOracle {
        let mut binom = [[0u64; UNIVERSE + 1]; UNIVERSE + 1];
        for n in 0..=UNIVERSE {
            binom[n][0] = 1;
            for k in 1..=n {
                binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
            }
        }
        let mut offsets = [[0u64; 4]; 4];
        let mut total = 0;
        for a in 0..4 {
            for b in 0..4 {
                offsets[a][b] = total;
                total += binom[UNIVERSE][a] * binom[UNIVERSE - a][b];
            }
        }
        let mut oracle = EditOracle { binom, offsets, dist: vec![u8::MAX; total as usize] };
        oracle.search();
        oracle
    }

    pub fn states(&self) -> usize {
        self.dist.len()
    }

    fn subset_rank(&self, mut mask: u32) -> u64 {
        let mut rank = 0;
        let mut j = 0;
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            j += 1;
            rank += self.binom[i][j];
            mask &= mask - 1;
        }
        rank
    }

    /// Drops the bits of `taken` from `mask`, shifting higher bits down.
    fn squeeze(mask: u32, taken: u32) -> u32 {
        let mut out = 0;
        let mut k = 0;
        for i in 0..UNIVERSE {
            if taken >> i & 1 == 1 {
                continue;
            }
            if mask >> i & 1 == 1 {
                out |= 1 << k;
            }
            k += 1;
        }
        out
    }

    fn index(&self, h1: u32, h2: u32) -> usize {
        let a = h1.count_ones() as usize;
        let b = h2.count_ones() as usize;
        let inner = self.binom[UNIVERSE - a][b];
        (self.offsets[a][b] + self.subset_rank(h1) * inner + self.subset_rank(Self::squeeze(h2, h1))) as usize
    }

    fn search(&mut self) {
        let mut queue = VecDeque::new();
        for suit_base in [0usize, 13] {
            for lo in 0..8 {
                let run: Vec<usize> = (lo..lo + 6).map(|r| suit_base + r).collect();
                for pick in 0u32..64 {
                    if pick.count_ones() != 3 {
                        continue;
                    }
                    let (mut h1, mut h2) = (0u32, 0u32);
                    for (k, &i) in run.iter().enumerate() {
                        if pick >> k & 1 == 1 {
                            h1 |= 1 << i;
                        } else {
                            h2 |= 1 << i;
                        }
                    }
                    let ix = self.index(h1, h2);
                    if self.dist[ix] == u8::MAX {
                        self.dist[ix] = 0;
                        queue.push_back((h1, h2));
                    }
                }
            }
        }
        while let Some((h1, h2)) = queue.pop_front() {
            let d = self.dist[self.index(h1, h2)];
            let held = h1 | h2;
            let mut visit = |n1: u32, n2: u32, q: &mut VecDeque<(u32, u32)>| {
                let ix = self.index(n1, n2);
                if self.dist[ix] == u8::MAX {
                    self.dist[ix] = d + 1;
                    q.push_back((n1, n2));
                }
            };
            for i in 0..UNIVERSE {
                let bit = 1u32 << i;
                if held & bit == 0 {
                    if h1.count_ones() < 3 {
                        visit(h1 | bit, h2, &mut queue);
                    }
                    if h2.count_ones() < 3 {
                        visit(h1, h2 | bit, &mut queue);
                    }
                } else if h1 & bit != 0 {
                    visit(h1 & !bit, h2, &mut queue);
                } else {
                    visit(h1, h2 & !bit, &mut queue);
                }
            }
        }
    }

    pub fn distance(&self, h1: u32, h2: u32) -> u8 {
        self.dist[self.index(h1, h2)]
    }
}

/// Hearts A..10 plus 5S and 6S.
pub fn mini_deck() -> Vec<u32> {
    let mut out: Vec<u32> = (0..10).map(|i| 1 << i).collect();
    out.push(1 << (13 + 4));
    out.push(1 << (13 + 5));
    out
}

/// Every ordered pair of disjoint hands of at most two cards from the mini deck.
pub fn mini_deck_pairs() -> Vec<(u32, u32)> {
    let deck = mini_deck();
    let mut hands = vec![0u32];
    for (i, a) in deck.iter().enumerate() {
        hands.push(*a);
        for b in &deck[i + 1..] {
            hands.push(a | b);
        }
    }
    let mut out = Vec::new();
    for &h1 in &hands {
        for &h2 in &hands {
            if h1 & h2 == 0 {
                out.push((h1, h2));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Logistic loss: central finite differences

pub struct GradientCase {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<bool>,
    pub w: Vec<f64>,
    pub b: f64,
    pub lambda: f64,
}

pub fn gradient_case(seed: u64) -> GradientCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(5..40);
    let d = rng.gen_range(1..8);
    GradientCase {
        x: (0..n).map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect(),
        y: (0..n).map(|_| rng.gen_bool(0.5)).collect(),
        w: (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect(),
        b: rng.gen_range(-1.0..1.0),
        lambda: [0.0, 1e-3, 0.1][rng.gen_range(0..3)],
    }
}

/// Worst relative error between analytic and central-difference gradients.
pub fn gradient_error(case: &GradientCase) -> f64 {
    use cards_core::model::{gradient, loss};
    let h = 1e-5;
    let f = |w: &[f64], b: f64| loss(&case.x, &case.y, w, b, case.lambda).unwrap();
    let (gw, gb) = gradient(&case.x, &case.y, &case.w, case.b, case.lambda).unwrap();
    let mut numeric = Vec::with_capacity(gw.len() + 1);
    for j in 0..case.w.len() {
        let mut up = case.w.clone();
        let mut down = case.w.clone();
        up[j] += h;
        down[j] -= h;
        numeric.push((f(&up, case.b) - f(&down, case.b)) / (2.0 * h));
    }
    numeric.push((f(&case.w, case.b + h) - f(&case.w, case.b - h)) / (2.0 * h));
    let analytic: Vec<f64> = gw.into_iter().chain([gb]).collect();
    let diff: f64 = analytic.iter().zip(&numeric).map(|(a, n)| (a - n).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt() + numeric.iter().map(|n| n * n).sum::<f64>().sqrt();
    if scale == 0.0 { 0.0 } else { diff / scale }
}

// ---------------------------------------------------------------------------
// The worked exchange about the five of hearts

pub struct Exchange {
    pub transcript: Transcript,
    pub annotations: Vec<AnnotationEvent>,
    pub locative_seq: u64,
}

/// The hand-report exchange, the locative about 5H, and the partner fetching it.
/// Not replayable: the board is a placeholder.
pub fn motivating_exchange() -> Exchange {
    use PlayerId::{P1, P2};
    let config = GameConfig::default();
    let state = new_game(&config, 0).unwrap();
    let mut events = vec![state.event_log[0].clone()];
    let mut push = |actor: PlayerId, kind: EventKind| {
        let seq = events.len() as u64 + 1;
        events.push(TranscriptEvent { seq, time: seq * 1000, actor: Actor::Player(actor), kind });
        seq
    };
    let say = |t: &str| EventKind::Utterance { text: t.into() };
    let s1 = push(P1, say("3h, 4h and ks"));
    let s2 = push(P2, say("i have a queen of diamonds and ace of club"));
    push(P2, say("we have a  mess lol"));
    let s4 = push(P1, say("i have 3h,4h,6h"));
    let s5 = push(P2, say("ok so we need to collect hearts then"));
    let loc = push(P1, say("there is a 5h in the very top left corner"));
    // Navigation to the corner is elided; only the outcome matters for labeling.
    push(P2, EventKind::Pickup { card: card("5H") });
    push(P2, say("ok i got it :)"));
    let annotations = vec![
        AnnotationEvent::new(s1, P1, Annotation::HandIs { player: P1, cards: cards("3H,4H,KS") }),
        AnnotationEvent::new(s2, P2, Annotation::HandIs { player: P2, cards: cards("QD,AC") }),
        AnnotationEvent::new(s4, P1, Annotation::HandIs { player: P1, cards: cards("3H,4H,6H") }),
        AnnotationEvent::new(s5, P2, Annotation::SuitAgreed { suit: Suit::Hearts }),
        AnnotationEvent::new(
            loc,
            P1,
            Annotation::CardFactIs { card: card("5H"), fact: CardStatus::KnownAt(Place::region("top-left")) },
        ),
    ];
    Exchange { transcript: Transcript::new("motivating", events), annotations, locative_seq: loc }
}
