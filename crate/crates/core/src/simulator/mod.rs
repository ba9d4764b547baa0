//! Synthetic games between two scripted players, with gold common-ground
//! annotations and follow-up behaviour driven by a [`FollowupRule`].

mod dialogue;
mod rule;

use std::path::Path;

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dialogue::{CLARIFICATIONS, INTENTIONS, NEUTRAL_ACKS};
pub use rule::{Cmp, FollowupRule, DEFAULT_RULE};

use crate::agent::{plan_path, region_place, AgentView};
use crate::card::{Card, CardSet, Suit};
use crate::commonground::{annotations_to_jsonl, Annotation, AnnotationEvent, CardStatus, CommonGround};
use crate::corpus::{
    extract_instances, write_jsonl, CorpusError, EventKind, LocativeInstance, Manifest, ManifestEntry, Transcript,
};
use crate::engine::{
    new_game, Action, ConfigError, Coord, GameConfig, GameState, PlayerId, Region, HAND_CAPACITY,
};
use crate::features::{AddresseeRule, ContextFeatures};
use crate::straights::enumerate_straights;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("invalid config: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommandMix {
    pub imperative: f64,
    pub performative: f64,
    pub locative: f64,
}

impl Default for CommandMix {
    fn default() -> Self {
        CommandMix { imperative: 0.15, performative: 0.1, locative: 0.75 }
    }
}

/// Relative chance of bringing up a card that serves no stated goal.
const OFF_PLAN_FACTOR: f64 = 0.6;
/// Relative chance of pointing out an on-plan card once the stated hands are
/// close to a win and the speaker's hand does not already complete a run.
const NEAR_GOAL_FACTOR: f64 = 0.15;

fn d_locative_rate() -> f64 {
    0.04
}
fn d_noise() -> f64 {
    0.1
}
fn d_max_events() -> usize {
    1200
}
fn d_announce() -> f64 {
    0.6
}
fn d_boost() -> f64 {
    0.8
}
fn d_window() -> usize {
    crate::corpus::DEFAULT_FOLLOWUP_WINDOW
}

/// Knobs of the scripted players. Only the first five are required in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorPolicy {
    /// Chance per turn that a player issues a command about a card it sees.
    #[serde(default = "d_locative_rate")]
    pub locative_rate: f64,
    #[serde(default)]
    pub command_mix: CommandMix,
    #[serde(default)]
    pub followup_rule: FollowupRule,
    /// Chance that the addressee does the opposite of what the rule says.
    #[serde(default = "d_noise")]
    pub noise_eps: f64,
    #[serde(default)]
    pub seed: u64,
    /// Hard cap on events per game.
    #[serde(default = "d_max_events")]
    pub max_events: usize,
    /// Chance per turn of reporting a hand that changed since the last report.
    #[serde(default = "d_announce")]
    pub announce_rate: f64,
    /// Command chance when the common ground shows the speaker holding a full run
    /// that the seen card extends.
    #[serde(default = "d_boost")]
    pub full_hand_rate: f64,
    #[serde(default = "d_window")]
    pub window: usize,
    #[serde(default)]
    pub addressee_rule: AddresseeRule,
}

impl Default for GeneratorPolicy {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl GeneratorPolicy {
    pub fn validate(&self) -> Result<(), SimError> {
        let probs = [
            ("locative_rate", self.locative_rate),
            ("noise_eps", self.noise_eps),
            ("announce_rate", self.announce_rate),
            ("full_hand_rate", self.full_hand_rate),
            ("command_mix.imperative", self.command_mix.imperative),
            ("command_mix.performative", self.command_mix.performative),
            ("command_mix.locative", self.command_mix.locative),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::InvalidPolicy(format!("{name} = {p} is not a probability")));
            }
        }
        let m = self.command_mix;
        let total = m.imperative + m.performative + m.locative;
        if (total - 1.0).abs() > 1e-9 {
            return Err(SimError::InvalidPolicy(format!("command_mix sums to {total}, not 1")));
        }
        if self.window == 0 || self.max_events == 0 {
            return Err(SimError::InvalidPolicy("window and max_events must be positive".into()));
        }
        Ok(())
    }
}

/// How the generator decided one locative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub seq: u64,
    pub speaker: PlayerId,
    pub card: Card,
    pub features: ContextFeatures,
    pub rule_fired: bool,
    pub flipped: bool,
}

impl Decision {
    pub fn followed_up(&self) -> bool {
        self.rule_fired != self.flipped
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedGame {
    pub transcript: Transcript,
    pub annotations: Vec<AnnotationEvent>,
    pub instances: Vec<LocativeInstance>,
    pub decisions: Vec<Decision>,
}

impl GeneratedGame {
    pub fn with_id(mut self, id: &str) -> GeneratedGame {
        self.transcript.id = id.to_string();
        for inst in &mut self.instances {
            inst.transcript_id = id.to_string();
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TaskKind {
    /// Fetching at the partner's request; `confirm` says "ok i got it :)" after.
    Requested { confirm: bool },
    Commanded,
    Own,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Task {
    card: Card,
    target: Coord,
    kind: TaskKind,
}

#[derive(Debug, Clone)]
struct Bot {
    view: AgentView,
    task: Option<Task>,
    /// Cards this player will not pick up on its own initiative.
    avoid: CardSet,
    announced: Option<CardSet>,
    stated_needs: CardSet,
    preferred: Suit,
    wander: Option<Coord>,
}

struct Sim<'a> {
    policy: &'a GeneratorPolicy,
    state: GameState,
    rng: ChaCha8Rng,
    bots: [Bot; 2],
    cg: CommonGround,
    annotations: Vec<AnnotationEvent>,
    decisions: Vec<Decision>,
    /// Cards named in any locative; imperatives and own pickups steer clear of them.
    mentioned: CardSet,
    proposed: Option<Suit>,
    finished: bool,
}

/// Suit-mates of `card` already in `hand` that share a straight with it.
fn extends_run(hand: CardSet, card: Card) -> bool {
    let same: CardSet = hand.iter().filter(|c| c.suit() == card.suit()).collect();
    let needed = same.with(card);
    enumerate_straights().iter().any(|s| needed.is_subset(s.cards()))
}

impl<'a> Sim<'a> {
    fn goal_suit(&self, p: PlayerId) -> Suit {
        self.cg.agreed_suit.unwrap_or(self.bots[p.index()].preferred)
    }

    /// Whether `p` would want `card` for the team's straight.
    fn wants(&self, p: PlayerId, card: Card) -> bool {
        let bot = &self.bots[p.index()];
        card.suit() == self.goal_suit(p) && !bot.avoid.contains(card) && extends_run(bot.view.hand, card)
    }

    fn refresh(&mut self, p: PlayerId) {
        let me = self.state.player(p).clone();
        let cells = self.state.visible_from(me.pos);
        let bot = &mut self.bots[p.index()];
        bot.view.pos = me.pos;
        bot.view.hand = me.hand;
        bot.view.observe(&cells);
    }

    fn tick(&mut self) {
        let ms = self.rng.gen_range(300..2500);
        self.state.advance_clock(ms);
    }

    fn act(&mut self, p: PlayerId, action: Action) -> Option<u64> {
        self.tick();
        let seq = self.state.apply(p, &action).ok()?;
        if let Some(EventKind::Bump { at, dir }) = self.state.event_log.last().map(|e| &e.kind) {
            let (at, dir) = (*at, *dir);
            self.bots[p.index()].view.record_bump(at, dir);
        }
        self.refresh(p);
        if crate::engine::check_win(&self.state).is_some() {
            self.finished = true;
        }
        Some(seq)
    }

    fn say(&mut self, p: PlayerId, text: String, facts: Vec<Annotation>) -> u64 {
        let seq = self.act(p, Action::Utter(text)).expect("utterances always apply");
        for fact in facts {
            let ev = AnnotationEvent::new(seq, p, fact);
            self.cg.apply(&ev).expect("generated annotations are valid");
            self.annotations.push(ev);
        }
        seq
    }

    fn run(&mut self) {
        let mut actor = if self.rng.gen_bool(0.5) { PlayerId::P1 } else { PlayerId::P2 };
        while !self.finished && self.state.event_log.len() < self.policy.max_events {
            if PlayerId::BOTH.iter().any(|p| self.state.moves_left(*p) == 0) {
                let stuck = if self.state.moves_left(PlayerId::P1) == 0 { PlayerId::P1 } else { PlayerId::P2 };
                self.say(stuck, "i'm out of moves".into(), vec![Annotation::CanAct { player: stuck, value: false }]);
                break;
            }
            self.step(actor);
            if self.rng.gen_bool(0.8) {
                actor = actor.other();
            }
        }
    }

    fn step(&mut self, p: PlayerId) {
        self.refresh(p);
        let i = p.index();
        if self.bots[i].task.is_some() {
            self.task_step(p);
            return;
        }
        if self.talk(p) {
            return;
        }
        if self.own_pickup(p) {
            return;
        }
        self.wander(p);
    }

    fn talk(&mut self, p: PlayerId) -> bool {
        let i = p.index();
        let hand = self.bots[i].view.hand;
        if self.bots[i].announced != Some(hand) && self.rng.gen_bool(self.policy.announce_rate) {
            let text = dialogue::hand_report(hand, &mut self.rng);
            self.say(p, text, vec![Annotation::HandIs { player: p, cards: hand }]);
            self.bots[i].announced = Some(hand);
            return true;
        }
        if self.cg.agreed_suit.is_none() && self.proposed.is_none() && !hand.is_empty() && self.rng.gen_bool(0.3) {
            let suit = self.bots[i].preferred;
            let text = dialogue::suit_proposal(suit, &mut self.rng);
            self.say(p, text, vec![]);
            self.proposed = Some(suit);
            let q = p.other();
            let reply = dialogue::suit_agreement(suit, &mut self.rng);
            self.say(q, reply, vec![Annotation::SuitAgreed { suit }]);
            for bot in &mut self.bots {
                bot.preferred = suit;
            }
            return true;
        }
        if let Some(suit) = self.cg.agreed_suit {
            let needs = self.missing_for_run(hand, suit);
            if !needs.is_empty() && needs != self.bots[i].stated_needs && self.rng.gen_bool(0.1) {
                let text = dialogue::needs(needs, &mut self.rng);
                self.say(p, text, vec![Annotation::Needs { player: p, cards: needs }]);
                self.bots[i].stated_needs = needs;
                return true;
            }
        }
        if self.rng.gen_bool(0.02) {
            let region = Region::of(self.bots[i].view.pos, self.state.board.width, self.state.board.height);
            let text = dialogue::own_location(region, &mut self.rng);
            self.say(p, text, vec![Annotation::LocationIs { player: p, place: region_place(region) }]);
            return true;
        }
        self.command(p)
    }

    /// Up to two cards that would complete the lowest straight of `suit` through
    /// the held suit-mates.
    fn missing_for_run(&self, hand: CardSet, suit: Suit) -> CardSet {
        let same: CardSet = hand.iter().filter(|c| c.suit() == suit).collect();
        if same.is_empty() {
            return CardSet::new();
        }
        enumerate_straights()
            .into_iter()
            .filter(|s| s.suit == suit && same.is_subset(s.cards()))
            .map(|s| s.cards().difference(hand))
            .next()
            .map(|missing| missing.iter().take(2).collect())
            .unwrap_or_default()
    }

    fn command(&mut self, p: PlayerId) -> bool {
        let i = p.index();
        let q = p.other();
        if self.bots[q.index()].task.is_some() || self.bots[i].task.is_some() {
            return false;
        }
        let hand = self.bots[i].view.hand;
        let candidates: Vec<(Card, Coord)> = self.bots[i]
            .view
            .seen
            .iter()
            .filter(|(c, _)| !self.mentioned.contains(**c))
            .map(|(c, at)| (*c, *at))
            .collect();
        if candidates.is_empty() {
            return false;
        }
        // Once a suit is agreed, players mostly talk about cards of that suit.
        let agreed = self.cg.agreed_suit;
        let partner_needs = self.cg.needed(q);
        let weights: Vec<f64> = candidates
            .iter()
            .map(|(c, _)| {
                let mut w = 1.0;
                if Some(c.suit()) == agreed {
                    w += 10.0;
                    if extends_run(hand, *c) {
                        w += 8.0;
                    }
                }
                if partner_needs.contains(*c) {
                    w += 4.0;
                }
                w
            })
            .collect();
        let (card, at) = candidates[WeightedIndex::new(&weights).expect("positive weights").sample(&mut self.rng)];
        // How likely a mention is depends on what the speaker can see in the
        // common ground, the same view the addressee reacts to.
        let f = ContextFeatures::compute(&self.cg, card, p, self.policy.addressee_rule);
        let rate = if f.full_hands >= 0.5 {
            self.policy.full_hand_rate.max(self.policy.locative_rate)
        } else if f.explicit_goal < 0.5 {
            self.policy.locative_rate * OFF_PLAN_FACTOR
        } else if f.edit_distance <= 4.0 {
            self.policy.locative_rate * NEAR_GOAL_FACTOR
        } else {
            self.policy.locative_rate
        };
        if !self.rng.gen_bool(rate) {
            return false;
        }
        let m = self.policy.command_mix;
        let kind = WeightedIndex::new([m.locative, m.imperative, m.performative])
            .map(|w| w.sample(&mut self.rng))
            .unwrap_or(0);
        let region = Region::of(at, self.state.board.width, self.state.board.height);
        match kind {
            0 => self.locative(p, card, at, region),
            _ => {
                let text = if kind == 1 {
                    dialogue::imperative(card, region, &mut self.rng)
                } else {
                    dialogue::performative(card, region, &mut self.rng)
                };
                self.say(p, text, vec![]);
                let ack = dialogue::COMMAND_ACKS.choose(&mut self.rng).unwrap().to_string();
                self.say(q, ack, vec![]);
                self.mentioned.insert(card);
                self.bots[i].avoid.insert(card);
                self.bots[q.index()].task = Some(Task { card, target: at, kind: TaskKind::Commanded });
            }
        }
        true
    }

    fn locative(&mut self, p: PlayerId, card: Card, at: Coord, region: Region) {
        let q = p.other();
        let text = dialogue::locative(card, region, &mut self.rng);
        let fact = Annotation::CardFactIs { card, fact: CardStatus::KnownAt(region_place(region)) };
        let seq = self.say(p, text, vec![fact]);
        let features = ContextFeatures::compute(&self.cg, card, p, self.policy.addressee_rule);
        let rule_fired = self.policy.followup_rule.eval(&features);
        let flipped = self.rng.gen_bool(self.policy.noise_eps);
        let decision = Decision { seq, speaker: p, card, features, rule_fired, flipped };
        let follow = decision.followed_up();
        self.decisions.push(decision);
        self.mentioned.insert(card);
        if follow {
            self.bots[p.index()].avoid.insert(card);
            if self.rng.gen_bool(0.3) {
                let ask = dialogue::CLARIFICATIONS.choose(&mut self.rng).unwrap().to_string();
                self.say(q, ask, vec![]);
                let answer = dialogue::clarification_answer(region, &mut self.rng);
                self.say(p, answer, vec![]);
            } else {
                let commit = dialogue::INTENTIONS.choose(&mut self.rng).unwrap().to_string();
                self.say(q, commit, vec![]);
            }
            let confirm = self.rng.gen_bool(0.8);
            self.bots[q.index()].task = Some(Task { card, target: at, kind: TaskKind::Requested { confirm } });
        } else {
            self.bots[q.index()].avoid.insert(card);
            let speaker_can_take = self.bots[p.index()].view.hand.len() < HAND_CAPACITY;
            if speaker_can_take && self.rng.gen_bool(0.4) {
                self.bots[p.index()].task = Some(Task { card, target: at, kind: TaskKind::Own });
            } else if self.rng.gen_bool(0.6) {
                let ack = dialogue::NEUTRAL_ACKS.choose(&mut self.rng).unwrap().to_string();
                self.say(q, ack, vec![]);
            }
        }
    }

    /// Least useful held card, never one the player was asked to keep.
    fn worst_card(&self, p: PlayerId) -> Option<Card> {
        let hand = self.bots[p.index()].view.hand;
        let goal = self.goal_suit(p);
        hand.iter().min_by_key(|c| {
            let others = hand.difference(CardSet::from_iter([*c]));
            (c.suit() == goal, extends_run(others, *c), c.rank())
        })
    }

    fn task_step(&mut self, p: PlayerId) {
        let i = p.index();
        let task = self.bots[i].task.expect("checked by caller");
        let pos = self.bots[i].view.pos;
        let r = self.state.config.visibility_radius;
        let still_there = self.bots[i].view.seen.get(&task.card) == Some(&task.target);
        if pos.chebyshev(task.target) <= r && !still_there {
            self.bots[i].task = None;
            return;
        }
        if pos == task.target {
            if self.bots[i].view.hand.len() >= HAND_CAPACITY {
                if let Some(worst) = self.worst_card(p) {
                    self.bots[i].avoid.insert(worst);
                    self.act(p, Action::Drop(worst));
                }
                return;
            }
            self.act(p, Action::Pickup(task.card));
            self.bots[i].task = None;
            // Confirm at once, before the partner can speak again.
            match task.kind {
                TaskKind::Requested { confirm: true } => {
                    self.say(p, crate::agent::CONFIRMATION.into(), vec![]);
                }
                TaskKind::Commanded => {
                    self.say(p, dialogue::command_done(task.card), vec![]);
                }
                _ => {}
            }
            return;
        }
        match plan_path(&self.bots[i].view, task.target) {
            Ok(path) if !path.is_empty() => {
                self.act(p, Action::Move(path[0]));
            }
            _ => self.bots[i].task = None,
        }
    }

    fn own_pickup(&mut self, p: PlayerId) -> bool {
        let i = p.index();
        let pos = self.bots[i].view.pos;
        let here: Vec<Card> = self.state.board.cards_at(pos).to_vec();
        if let Some(card) = here.into_iter().find(|c| self.wants(p, *c) && !self.mentioned.contains(*c)) {
            if self.bots[i].view.hand.len() < HAND_CAPACITY {
                self.act(p, Action::Pickup(card));
                return true;
            }
            let goal = self.goal_suit(p);
            if let Some(spare) = self.bots[i].view.hand.iter().find(|c| c.suit() != goal) {
                self.bots[i].avoid.insert(spare);
                self.act(p, Action::Drop(spare));
                return true;
            }
            return false;
        }
        // Head for a wanted card in view now and then.
        let seen: Vec<(Card, Coord)> = self.bots[i].view.seen.iter().map(|(c, at)| (*c, *at)).collect();
        let wanted = seen
            .into_iter()
            .filter(|(c, _)| self.wants(p, *c) && !self.mentioned.contains(*c))
            .min_by_key(|(_, at)| at.manhattan(pos));
        if let Some((card, at)) = wanted {
            let room = self.bots[i].view.hand.len() < HAND_CAPACITY
                || self.bots[i].view.hand.iter().any(|c| c.suit() != self.goal_suit(p));
            if room && self.rng.gen_bool(0.5) {
                self.bots[i].task = Some(Task { card, target: at, kind: TaskKind::Own });
                self.task_step(p);
                return true;
            }
        }
        false
    }

    fn wander(&mut self, p: PlayerId) {
        let i = p.index();
        let (w, h) = (self.state.board.width, self.state.board.height);
        for _ in 0..4 {
            let pos = self.bots[i].view.pos;
            let target = match self.bots[i].wander {
                Some(t) if t != pos => t,
                _ => Coord::new(self.rng.gen_range(0..w), self.rng.gen_range(0..h)),
            };
            self.bots[i].wander = Some(target);
            match plan_path(&self.bots[i].view, target) {
                Ok(path) if !path.is_empty() => {
                    self.act(p, Action::Move(path[0]));
                    return;
                }
                _ => self.bots[i].wander = None,
            }
        }
    }
}

fn game_rng(seed: u64, policy_seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(policy_seed);
    rng
}

/// Plays one scripted game. Same inputs, same output.
pub fn generate_game(config: &GameConfig, policy: &GeneratorPolicy, seed: u64) -> Result<GeneratedGame, SimError> {
    policy.validate()?;
    let state = new_game(config, seed)?;
    let mut rng = game_rng(seed, policy.seed);
    let suits = [Suit::Clubs, Suit::Diamonds, Suit::Hearts, Suit::Spades];
    let bots = PlayerId::BOTH.map(|p| {
        let me = state.player(p);
        Bot {
            view: AgentView::new(config.width, config.height, me.pos),
            task: None,
            avoid: CardSet::new(),
            announced: None,
            stated_needs: CardSet::new(),
            preferred: *suits.choose(&mut rng).unwrap(),
            wander: None,
        }
    });
    let mut sim = Sim {
        policy,
        state,
        rng,
        bots,
        cg: CommonGround::default(),
        annotations: Vec::new(),
        decisions: Vec::new(),
        mentioned: CardSet::new(),
        proposed: None,
        finished: false,
    };
    sim.run();
    let transcript = Transcript::new(format!("g{seed:016x}"), sim.state.event_log);
    let instances = extract_instances(&transcript, policy.window);
    Ok(GeneratedGame { transcript, annotations: sim.annotations, instances, decisions: sim.decisions })
}

/// Games with seeds drawn from `seed` until at least `n` instances exist; the
/// first `n` are returned along with the games they came from.
pub fn generate_instances(
    config: &GameConfig,
    policy: &GeneratorPolicy,
    seed: u64,
    n: usize,
) -> Result<Vec<GeneratedGame>, SimError> {
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let mut games = Vec::new();
    let mut total = 0;
    while total < n {
        let index = games.len();
        let game = generate_game(config, policy, seeds.next_u64())?.with_id(&format!("game{index:05}"));
        total += game.instances.len();
        games.push(game);
        if index > 100 * n.max(1) {
            return Err(SimError::InvalidPolicy("policy produces no locative instances".into()));
        }
    }
    let mut excess = total - n;
    while excess > 0 {
        let last = games.last_mut().expect("total > n implies a game");
        let cut = excess.min(last.instances.len());
        last.instances.truncate(last.instances.len() - cut);
        excess -= cut;
    }
    Ok(games)
}

/// Writes `n_games` games and a manifest under `out`:
/// `manifest.json`, `transcripts/<id>.jsonl`, `annotations/<id>.jsonl`, `instances/<id>.jsonl`.
pub fn generate_corpus(
    n_games: usize,
    config: &GameConfig,
    policy: &GeneratorPolicy,
    seed: u64,
    out: &Path,
) -> Result<Manifest, SimError> {
    if n_games == 0 {
        return Err(SimError::InvalidPolicy("n_games must be positive".into()));
    }
    policy.validate()?;
    config.validate()?;
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let game_seeds: Vec<u64> = (0..n_games).map(|_| seeds.next_u64()).collect();
    let mut entries = Vec::with_capacity(n_games);
    for (i, game_seed) in game_seeds.into_iter().enumerate() {
        let id = format!("game{i:05}");
        let game = generate_game(config, policy, game_seed)?.with_id(&id);
        let entry = ManifestEntry {
            id: id.clone(),
            seed: game_seed,
            transcript: format!("transcripts/{id}.jsonl"),
            annotations: format!("annotations/{id}.jsonl"),
            instances: format!("instances/{id}.jsonl"),
        };
        write_text(&out.join(&entry.transcript), &game.transcript.to_jsonl())?;
        write_text(&out.join(&entry.annotations), &annotations_to_jsonl(&game.annotations))?;
        write_jsonl(&out.join(&entry.instances), &game.instances)?;
        entries.push(entry);
    }
    let manifest = Manifest {
        master_seed: seed,
        config: config.clone(),
        policy: serde_json::to_value(policy).expect("policy serializes"),
        games: entries,
    };
    write_text(&out.join("manifest.json"), &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"))?;
    Ok(manifest)
}

fn write_text(path: &Path, text: &str) -> Result<(), CorpusError> {
    let io = |source| CorpusError::Io { path: path.display().to_string(), source };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}
