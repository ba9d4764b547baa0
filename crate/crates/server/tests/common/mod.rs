#![allow(dead_code)]

use std::path::{Path, PathBuf};

use cards_core::card::{cards, Card};
use cards_core::engine::{Action, Coord, Direction, GameConfig, PlayerId};
use cards_core::model::{Hyperparams, LogRegModel};
use cards_server::protocol::{CreateRequest, Envelope, Opponent};
use cards_server::{lock, ServerError, SessionManager};

/// A model that acts on every locative.
pub fn eager_model(dir: &Path) -> PathBuf {
    let model = LogRegModel {
        feature_names: vec!["full_hands".into(), "explicit_goal".into()],
        weights: vec![0.0, 0.0],
        bias: 5.0,
        hyperparams: Hyperparams::default(),
        vocab_ref: None,
    };
    let path = dir.join("model.json");
    std::fs::write(&path, serde_json::to_string(&model).unwrap()).unwrap();
    path
}

pub fn small_config(deck: &str) -> GameConfig {
    GameConfig { width: 6, height: 6, deck: cards(deck).to_vec(), ..GameConfig::default() }
}

pub fn human_game(manager: &SessionManager, config: GameConfig, seed: u64) -> (String, String, String) {
    let req = CreateRequest { config: Some(config), opponent: Opponent::Human, model: None, seed: Some(seed) };
    let p1 = manager.create_session(&req).unwrap();
    let p2 = manager.join(&p1.session_id).unwrap();
    assert_eq!(p2.seat, PlayerId::P2);
    (p1.session_id, p1.token, p2.token)
}

pub fn position(manager: &SessionManager, id: &str, p: PlayerId) -> Coord {
    lock(&manager.get(id).unwrap()).state.player(p).pos
}

pub fn card_location(manager: &SessionManager, id: &str, card: Card) -> Option<Coord> {
    lock(&manager.get(id).unwrap()).state.board.locate(card)
}

pub fn step_toward(from: Coord, to: Coord) -> Option<Direction> {
    if to.x > from.x {
        Some(Direction::East)
    } else if to.x < from.x {
        Some(Direction::West)
    } else if to.y > from.y {
        Some(Direction::South)
    } else if to.y < from.y {
        Some(Direction::North)
    } else {
        None
    }
}

/// Walks `p` to `card` on a wall-free board and picks it up.
pub fn fetch(manager: &SessionManager, id: &str, token: &str, p: PlayerId, card: Card) -> Result<u64, ServerError> {
    let target = card_location(manager, id, card).expect("card on the board");
    while let Some(dir) = step_toward(position(manager, id, p), target) {
        manager.submit(id, token, &Action::Move(dir))?;
    }
    manager.submit(id, token, &Action::Pickup(card))
}

pub fn stream(manager: &SessionManager, id: &str, token: &str) -> Vec<Envelope> {
    manager.event_stream(id, token, 0).unwrap().1
}
