//! Wire messages. Every message travels in an envelope `{type, seq, payload}`;
//! `seq` numbers each player's stream from 1 so a client can resume.

use cards_core::card::CardSet;
use cards_core::engine::{Action, ActionError, Coord, Direction, GameConfig, PlayerId, VisibleCell};
use cards_core::straights::Straight;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Opponent {
    Agent,
    Human,
}

/// Body of `POST /sessions`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateRequest {
    #[serde(default)]
    pub config: Option<GameConfig>,
    pub opponent: Opponent,
    /// Model file for the agent; the server default is used when absent.
    #[serde(default)]
    pub model: Option<String>,
    /// Board seed; random when absent.
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Returned by create and join.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeatGrant {
    pub session_id: String,
    pub seat: PlayerId,
    pub token: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    Win,
    OutOfMoves,
}

/// What one player may see of their own situation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerView {
    pub pos: Coord,
    pub hand: CardSet,
    pub moves_left: u32,
    pub cells: Vec<VisibleCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum ServerMessage {
    Welcome {
        session_id: String,
        seat: PlayerId,
        width: i32,
        height: i32,
        move_budget: u32,
        visibility_radius: u32,
    },
    View(PlayerView),
    /// Sent only to the player who walked into the wall.
    Bump { at: Coord, dir: Direction },
    Utterance { event_seq: u64, speaker: PlayerId, text: String },
    /// Reply to a websocket submit.
    Ack { event_seq: u64 },
    Rejected { error: ActionError },
    GameOver { reason: EndReason, straight: Option<Straight> },
    /// A request the session could not serve, e.g. a submit after game over.
    Error { code: String, message: String },
}

impl ServerMessage {
    pub fn kind(&self) -> &'static str {
        match self {
            ServerMessage::Welcome { .. } => "welcome",
            ServerMessage::View(_) => "view",
            ServerMessage::Bump { .. } => "bump",
            ServerMessage::Utterance { .. } => "utterance",
            ServerMessage::Ack { .. } => "ack",
            ServerMessage::Rejected { .. } => "rejected",
            ServerMessage::GameOver { .. } => "game_over",
            ServerMessage::Error { .. } => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub seq: u64,
    #[serde(flatten)]
    pub message: ServerMessage,
}

/// Client-to-server websocket messages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum ClientMessage {
    Submit(Action),
}

#[cfg(test)]
mod tests {
    use super::*;
    use cards_core::card::card;

    #[test]
    fn envelope_shape() {
        let env = Envelope {
            seq: 4,
            message: ServerMessage::Utterance { event_seq: 9, speaker: PlayerId::P2, text: "ok i got it :)".into() },
        };
        let v = serde_json::to_value(&env).unwrap();
        assert_eq!(v["type"], "utterance");
        assert_eq!(v["seq"], 4);
        assert_eq!(v["payload"]["speaker"], "P2");
        assert_eq!(serde_json::from_value::<Envelope>(v).unwrap(), env);
    }

    #[test]
    fn client_messages_parse() {
        let m: ClientMessage = serde_json::from_str(r#"{"type":"submit","payload":{"pickup":"5H"}}"#).unwrap();
        assert_eq!(m, ClientMessage::Submit(Action::Pickup(card("5H"))));
        let m: ClientMessage = serde_json::from_str(r#"{"type":"submit","payload":{"move":"north"}}"#).unwrap();
        assert_eq!(m, ClientMessage::Submit(Action::Move(Direction::North)));
    }

    #[test]
    fn rejected_carries_the_engine_error() {
        let v = serde_json::to_value(ServerMessage::Rejected { error: ActionError::HandFull }).unwrap();
        assert_eq!(v["payload"]["error"]["error"], "hand_full");
    }
}
