//! Deterministic state machine for the Cards game world.
//!
//! A [`GameState`] is a plain value. [`apply_action`] and friends take a state and
//! return the successor; [`GameState::apply`] is the in-place equivalent and
//! leaves the state untouched when the action is rejected.

mod geometry;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use geometry::{Coord, Direction, Edge, Region};

use crate::card::{Card, CardSet};
use crate::corpus::{Actor, BoardInit, EventKind, TranscriptEvent};
use crate::straights::Straight;

pub const HAND_CAPACITY: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PlayerId {
    P1,
    P2,
}

impl PlayerId {
    pub const BOTH: [PlayerId; 2] = [PlayerId::P1, PlayerId::P2];

    pub fn other(self) -> PlayerId {
        match self {
            PlayerId::P1 => PlayerId::P2,
            PlayerId::P2 => PlayerId::P1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            PlayerId::P1 => 0,
            PlayerId::P2 => 1,
        }
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlayerId::P1 => "P1",
            PlayerId::P2 => "P2",
        })
    }
}

impl std::str::FromStr for PlayerId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "P1" => Ok(PlayerId::P1),
            "P2" => Ok(PlayerId::P2),
            _ => Err(format!("unknown player {s:?}")),
        }
    }
}

/// A wall on the edge between two adjacent cells, as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WallSpec {
    pub from: Coord,
    pub to: Coord,
    pub visible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub width: i32,
    pub height: i32,
    pub deck: Vec<Card>,
    #[serde(default)]
    pub walls: Vec<WallSpec>,
    #[serde(default = "default_move_budget")]
    pub move_budget: u32,
    #[serde(default = "default_visibility_radius")]
    pub visibility_radius: u32,
    /// Whether a move blocked by a wall still counts against the budget.
    #[serde(default = "default_true")]
    pub charge_bumps: bool,
}

fn default_move_budget() -> u32 {
    200
}

fn default_visibility_radius() -> u32 {
    2
}

fn default_true() -> bool {
    true
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            width: 20,
            height: 15,
            deck: Card::full_deck(),
            walls: Vec::new(),
            move_budget: default_move_budget(),
            visibility_radius: default_visibility_radius(),
            charge_bumps: true,
        }
    }
}

impl GameConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.width <= 0 || self.height <= 0 {
            return Err(ConfigError::ZeroArea { width: self.width, height: self.height });
        }
        if self.width < 4 || self.height < 4 {
            return Err(ConfigError::TooSmall { width: self.width, height: self.height });
        }
        let mut seen = CardSet::new();
        for &card in &self.deck {
            if !seen.insert(card) {
                return Err(ConfigError::DuplicateCard(card));
            }
        }
        let mut edges = BTreeSet::new();
        for wall in &self.walls {
            let in_bounds = |c: Coord| c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height;
            if !in_bounds(wall.from) || !in_bounds(wall.to) {
                return Err(ConfigError::BadWall(*wall));
            }
            let edge = Edge::between(wall.from, wall.to).ok_or(ConfigError::BadWall(*wall))?;
            if !edges.insert(edge) {
                return Err(ConfigError::BadWall(*wall));
            }
        }
        Ok(())
    }

    /// Adds `count` walls on random interior edges, a fraction `visible_frac` of them visible.
    pub fn with_random_walls(mut self, count: usize, visible_frac: f64, seed: u64) -> GameConfig {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut taken: BTreeSet<Edge> = self
            .walls
            .iter()
            .filter_map(|w| Edge::between(w.from, w.to))
            .collect();
        let (mut added, mut attempts) = (0, 0);
        while added < count && attempts < count * 20 {
            attempts += 1;
            let from = Coord::new(rng.gen_range(0..self.width), rng.gen_range(0..self.height));
            let dir = if rng.gen_bool(0.5) { Direction::East } else { Direction::South };
            let to = from.step(dir);
            if to.x >= self.width || to.y >= self.height {
                continue;
            }
            let edge = Edge::between(from, to).expect("adjacent by construction");
            if taken.insert(edge) {
                added += 1;
                self.walls.push(WallSpec { from, to, visible: rng.gen_bool(visible_frac) });
            }
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("board has zero area ({width}x{height})")]
    ZeroArea { width: i32, height: i32 },
    #[error("board must be at least 4x4, got {width}x{height}")]
    TooSmall { width: i32, height: i32 },
    #[error("card {0} appears more than once in the deck")]
    DuplicateCard(Card),
    #[error("wall {0:?} is not on an interior edge or is duplicated")]
    BadWall(WallSpec),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Move(Direction),
    Pickup(Card),
    Drop(Card),
    Utter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", content = "detail", rename_all = "snake_case")]
pub enum ActionError {
    #[error("hand already holds three cards")]
    HandFull,
    #[error("{0} is not at the player's position")]
    NoSuchCardHere(Card),
    #[error("{0} is not in the player's hand")]
    NotInHand(Card),
    #[error("move budget exhausted")]
    BudgetExhausted,
    #[error("move would leave the board")]
    OutOfBounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Board {
    pub width: i32,
    pub height: i32,
    /// Wall edges, flagged visible (`true`) or invisible.
    #[serde(with = "pairs")]
    pub walls: BTreeMap<Edge, bool>,
    #[serde(with = "pairs")]
    pub placements: BTreeMap<Coord, Vec<Card>>,
}

impl Board {
    pub fn in_bounds(&self, c: Coord) -> bool {
        c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height
    }

    pub fn cards_at(&self, c: Coord) -> &[Card] {
        self.placements.get(&c).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn wall_between(&self, p: Coord, q: Coord) -> Option<bool> {
        Edge::between(p, q).and_then(|e| self.walls.get(&e).copied())
    }

    pub fn locate(&self, card: Card) -> Option<Coord> {
        self.placements
            .iter()
            .find(|(_, cards)| cards.contains(&card))
            .map(|(c, _)| *c)
    }

    pub fn placed_cards(&self) -> CardSet {
        self.placements.values().flatten().copied().collect()
    }

    pub fn region_of(&self, c: Coord) -> Region {
        Region::of(c, self.width, self.height)
    }

    fn take(&mut self, at: Coord, card: Card) -> bool {
        let Some(cards) = self.placements.get_mut(&at) else {
            return false;
        };
        let Some(i) = cards.iter().position(|c| *c == card) else {
            return false;
        };
        cards.remove(i);
        if cards.is_empty() {
            self.placements.remove(&at);
        }
        true
    }

    fn put(&mut self, at: Coord, card: Card) {
        self.placements.entry(at).or_default().push(card);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerState {
    pub id: PlayerId,
    pub pos: Coord,
    pub hand: CardSet,
    pub moves_used: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub config: GameConfig,
    pub board: Board,
    pub players: [PlayerState; 2],
    pub move_budget: u32,
    pub event_log: Vec<TranscriptEvent>,
    pub rng_seed: u64,
    /// Timestamp (ms) stamped on the next logged event.
    pub clock_ms: u64,
}

/// One cell of a player's visible neighbourhood.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibleCell {
    pub at: Coord,
    pub cards: Vec<Card>,
    /// Visible walls touching this cell.
    pub walls: Vec<Edge>,
}

pub fn new_game(config: &GameConfig, seed: u64) -> Result<GameState, ConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (config.width, config.height);
    let random_cell = |rng: &mut ChaCha8Rng| Coord::new(rng.gen_range(0..w), rng.gen_range(0..h));

    let mut placements: BTreeMap<Coord, Vec<Card>> = BTreeMap::new();
    for &card in &config.deck {
        placements.entry(random_cell(&mut rng)).or_default().push(card);
    }
    let cells: Vec<Coord> = (0..h).flat_map(|y| (0..w).map(move |x| Coord::new(x, y))).collect();
    let starts: Vec<Coord> = cells.choose_multiple(&mut rng, 2).copied().collect();

    let walls = config
        .walls
        .iter()
        .map(|wall| (Edge::between(wall.from, wall.to).expect("validated"), wall.visible))
        .collect();
    let board = Board { width: w, height: h, walls, placements };
    let players = [
        PlayerState { id: PlayerId::P1, pos: starts[0], hand: CardSet::new(), moves_used: 0 },
        PlayerState { id: PlayerId::P2, pos: starts[1], hand: CardSet::new(), moves_used: 0 },
    ];
    let init = BoardInit {
        config: config.clone(),
        seed,
        positions: [starts[0], starts[1]],
        placements: board.placements.clone(),
    };
    let mut state = GameState {
        config: config.clone(),
        board,
        players,
        move_budget: config.move_budget,
        event_log: Vec::new(),
        rng_seed: seed,
        clock_ms: 0,
    };
    state.log(Actor::System, EventKind::BoardInit(Box::new(init)));
    Ok(state)
}

/// Rebuilds the initial state recorded in a board-init event.
pub fn state_from_init(init: &BoardInit) -> Result<GameState, ConfigError> {
    init.config.validate()?;
    let walls = init
        .config
        .walls
        .iter()
        .map(|wall| (Edge::between(wall.from, wall.to).expect("validated"), wall.visible))
        .collect();
    let board = Board {
        width: init.config.width,
        height: init.config.height,
        walls,
        placements: init.placements.clone(),
    };
    let mut state = GameState {
        config: init.config.clone(),
        board,
        players: [
            PlayerState { id: PlayerId::P1, pos: init.positions[0], hand: CardSet::new(), moves_used: 0 },
            PlayerState { id: PlayerId::P2, pos: init.positions[1], hand: CardSet::new(), moves_used: 0 },
        ],
        move_budget: init.config.move_budget,
        event_log: Vec::new(),
        rng_seed: init.seed,
        clock_ms: 0,
    };
    state.log(Actor::System, EventKind::BoardInit(Box::new(init.clone())));
    Ok(state)
}

pub fn apply_action(state: &GameState, actor: PlayerId, action: &Action) -> Result<GameState, ActionError> {
    let mut next = state.clone();
    next.apply(actor, action)?;
    Ok(next)
}

pub fn visible_neighborhood(state: &GameState, player: PlayerId) -> Vec<VisibleCell> {
    state.visible_from(state.player(player).pos)
}

pub fn check_win(state: &GameState) -> Option<Straight> {
    let [p1, p2] = &state.players;
    crate::straights::winning_straight(p1.hand, p2.hand)
}

impl GameState {
    pub fn player(&self, id: PlayerId) -> &PlayerState {
        &self.players[id.index()]
    }

    fn player_mut(&mut self, id: PlayerId) -> &mut PlayerState {
        &mut self.players[id.index()]
    }

    pub fn moves_left(&self, id: PlayerId) -> u32 {
        self.move_budget.saturating_sub(self.player(id).moves_used)
    }

    pub fn last_seq(&self) -> u64 {
        self.event_log.last().map_or(0, |e| e.seq)
    }

    pub fn advance_clock(&mut self, ms: u64) {
        self.clock_ms += ms;
    }

    fn log(&mut self, actor: Actor, kind: EventKind) -> u64 {
        let seq = self.last_seq() + 1;
        self.event_log.push(TranscriptEvent { seq, time: self.clock_ms, actor, kind });
        seq
    }

    /// Applies an action in place. On error the state is unchanged.
    pub fn apply(&mut self, actor: PlayerId, action: &Action) -> Result<u64, ActionError> {
        let me = self.player(actor).clone();
        let kind = match action {
            Action::Move(dir) => {
                if me.moves_used >= self.move_budget {
                    return Err(ActionError::BudgetExhausted);
                }
                let to = me.pos.step(*dir);
                if !self.board.in_bounds(to) {
                    return Err(ActionError::OutOfBounds);
                }
                if self.board.wall_between(me.pos, to).is_some() {
                    if self.config.charge_bumps {
                        self.player_mut(actor).moves_used += 1;
                    }
                    EventKind::Bump { at: me.pos, dir: *dir }
                } else {
                    let p = self.player_mut(actor);
                    p.pos = to;
                    p.moves_used += 1;
                    EventKind::MoveTo { to }
                }
            }
            Action::Pickup(card) => {
                if !self.board.cards_at(me.pos).contains(card) {
                    return Err(ActionError::NoSuchCardHere(*card));
                }
                if me.hand.len() >= HAND_CAPACITY {
                    return Err(ActionError::HandFull);
                }
                self.board.take(me.pos, *card);
                self.player_mut(actor).hand.insert(*card);
                EventKind::Pickup { card: *card }
            }
            Action::Drop(card) => {
                if !me.hand.contains(*card) {
                    return Err(ActionError::NotInHand(*card));
                }
                self.player_mut(actor).hand.remove(*card);
                self.board.put(me.pos, *card);
                EventKind::Drop { card: *card }
            }
            Action::Utter(text) => EventKind::Utterance { text: text.clone() },
        };
        Ok(self.log(Actor::Player(actor), kind))
    }

    pub fn visible_from(&self, center: Coord) -> Vec<VisibleCell> {
        let r = self.config.visibility_radius as i32;
        let mut out = Vec::new();
        for y in (center.y - r).max(0)..=(center.y + r).min(self.board.height - 1) {
            for x in (center.x - r).max(0)..=(center.x + r).min(self.board.width - 1) {
                let at = Coord::new(x, y);
                let walls = Direction::ALL
                    .iter()
                    .filter_map(|d| Edge::between(at, at.step(*d)))
                    .filter(|e| self.board.walls.get(e) == Some(&true))
                    .collect();
                out.push(VisibleCell { at, cards: self.board.cards_at(at).to_vec(), walls });
            }
        }
        out
    }

    /// Every card in play, on the board or in a hand.
    pub fn all_cards(&self) -> Vec<Card> {
        let mut all: Vec<Card> = self.board.placements.values().flatten().copied().collect();
        for p in &self.players {
            all.extend(p.hand.iter());
        }
        all.sort();
        all
    }
}

/// Serializes a map with non-string keys as a list of `[key, value]` pairs.
pub(crate) mod pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(
        map: &BTreeMap<K, V>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(map.iter())
    }

    pub fn deserialize<'de, K, V, D>(deserializer: D) -> Result<BTreeMap<K, V>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        Ok(Vec::<(K, V)>::deserialize(deserializer)?.into_iter().collect())
    }
}
