//! Transcript events and their JSONL wire format.
//!
//! Each line is one object with exactly the keys
//! `{"seq": int, "time": int, "actor": "P1"|"P2"|"system", "kind": string, "payload": object}`.
//!
//! | kind         | payload                                                  |
//! |--------------|----------------------------------------------------------|
//! | `board_init` | `{config, seed, positions: [[x,y],[x,y]], placements}`   |
//! | `utterance`  | `{text}`                                                 |
//! | `move_to`    | `{to: [x,y]}`                                            |
//! | `pickup`     | `{card}`                                                 |
//! | `drop`       | `{card}`                                                 |
//! | `bump`       | `{at: [x,y], dir}`                                       |

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CorpusError;
use crate::card::Card;
use crate::engine::{Coord, Direction, GameConfig, PlayerId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Actor {
    Player(PlayerId),
    System,
}

impl Actor {
    pub fn player(self) -> Option<PlayerId> {
        match self {
            Actor::Player(p) => Some(p),
            Actor::System => None,
        }
    }
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Actor::Player(p) => write!(f, "{p}"),
            Actor::System => f.write_str("system"),
        }
    }
}

impl Serialize for Actor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Actor {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match String::deserialize(deserializer)?.as_str() {
            "P1" => Ok(Actor::Player(PlayerId::P1)),
            "P2" => Ok(Actor::Player(PlayerId::P2)),
            "system" => Ok(Actor::System),
            other => Err(serde::de::Error::custom(format!("unknown actor {other:?}"))),
        }
    }
}

/// Initial layout of a game: enough to rebuild the starting state exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoardInit {
    pub config: GameConfig,
    pub seed: u64,
    /// Starting cells of P1 and P2.
    pub positions: [Coord; 2],
    #[serde(with = "crate::engine::pairs")]
    pub placements: BTreeMap<Coord, Vec<Card>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    BoardInit(Box<BoardInit>),
    Utterance { text: String },
    MoveTo { to: Coord },
    Pickup { card: Card },
    Drop { card: Card },
    Bump { at: Coord, dir: Direction },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::BoardInit(_) => "board_init",
            EventKind::Utterance { .. } => "utterance",
            EventKind::MoveTo { .. } => "move_to",
            EventKind::Pickup { .. } => "pickup",
            EventKind::Drop { .. } => "drop",
            EventKind::Bump { .. } => "bump",
        }
    }

    fn payload(&self) -> Value {
        use serde_json::json;
        match self {
            EventKind::BoardInit(init) => serde_json::to_value(init).expect("board init serializes"),
            EventKind::Utterance { text } => json!({ "text": text }),
            EventKind::MoveTo { to } => json!({ "to": to }),
            EventKind::Pickup { card } | EventKind::Drop { card } => json!({ "card": card }),
            EventKind::Bump { at, dir } => json!({ "at": at, "dir": dir }),
        }
    }

    fn from_parts(kind: &str, payload: Value) -> Result<EventKind, String> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Text {
            text: String,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct To {
            to: Coord,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct CardPayload {
            card: Card,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct BumpPayload {
            at: Coord,
            dir: Direction,
        }
        let err = |e: serde_json::Error| format!("bad {kind} payload: {e}");
        Ok(match kind {
            "board_init" => EventKind::BoardInit(Box::new(serde_json::from_value(payload).map_err(err)?)),
            "utterance" => {
                let p: Text = serde_json::from_value(payload).map_err(err)?;
                EventKind::Utterance { text: p.text }
            }
            "move_to" => {
                let p: To = serde_json::from_value(payload).map_err(err)?;
                EventKind::MoveTo { to: p.to }
            }
            "pickup" => {
                let p: CardPayload = serde_json::from_value(payload).map_err(err)?;
                EventKind::Pickup { card: p.card }
            }
            "drop" => {
                let p: CardPayload = serde_json::from_value(payload).map_err(err)?;
                EventKind::Drop { card: p.card }
            }
            "bump" => {
                let p: BumpPayload = serde_json::from_value(payload).map_err(err)?;
                EventKind::Bump { at: p.at, dir: p.dir }
            }
            other => return Err(format!("unknown event kind {other:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEvent {
    pub seq: u64,
    /// Milliseconds since the start of the game.
    pub time: u64,
    pub actor: Actor,
    pub kind: EventKind,
}

impl TranscriptEvent {
    pub fn utterance(&self) -> Option<&str> {
        match &self.kind {
            EventKind::Utterance { text } => Some(text),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireEvent {
    seq: u64,
    time: u64,
    actor: Actor,
    kind: String,
    payload: Value,
}

impl Serialize for TranscriptEvent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        WireEvent {
            seq: self.seq,
            time: self.time,
            actor: self.actor,
            kind: self.kind.name().to_string(),
            payload: self.kind.payload(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TranscriptEvent {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = WireEvent::deserialize(deserializer)?;
        let kind = EventKind::from_parts(&wire.kind, wire.payload).map_err(serde::de::Error::custom)?;
        Ok(TranscriptEvent { seq: wire.seq, time: wire.time, actor: wire.actor, kind })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub id: String,
    pub events: Vec<TranscriptEvent>,
}

impl Transcript {
    pub fn new(id: impl Into<String>, events: Vec<TranscriptEvent>) -> Transcript {
        Transcript { id: id.into(), events }
    }

    pub fn board_init(&self) -> &BoardInit {
        match &self.events[0].kind {
            EventKind::BoardInit(init) => init,
            _ => unreachable!("validated transcripts start with board_init"),
        }
    }

    pub fn position(&self, seq: u64) -> Option<usize> {
        self.events.binary_search_by_key(&seq, |e| e.seq).ok()
    }

    pub fn event(&self, seq: u64) -> Option<&TranscriptEvent> {
        self.position(seq).map(|i| &self.events[i])
    }

    /// Utterance texts up to and including `seq`.
    pub fn utterances_through(&self, seq: u64) -> Vec<&str> {
        self.events
            .iter()
            .take_while(|e| e.seq <= seq)
            .filter(|e| e.actor != Actor::System)
            .filter_map(TranscriptEvent::utterance)
            .collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(event).expect("events serialize"));
            out.push('\n');
        }
        out
    }
}

/// Parses and validates a JSONL transcript. Blank lines are ignored; line numbers
/// in errors are 1-based physical lines.
pub fn parse_transcript(id: &str, text: &str) -> Result<Transcript, CorpusError> {
    let mut events: Vec<TranscriptEvent> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let event: TranscriptEvent = serde_json::from_str(line)
            .map_err(|e| CorpusError::Schema { line: line_no, message: e.to_string() })?;
        let is_init = matches!(event.kind, EventKind::BoardInit(_));
        match events.last() {
            None if !is_init => return Err(CorpusError::MissingBoardInit),
            Some(_) if is_init => {
                return Err(CorpusError::Schema { line: line_no, message: "board_init must be the first event".into() })
            }
            Some(prev) if event.seq <= prev.seq => return Err(CorpusError::NonMonotonicSeq { line: line_no }),
            _ => {}
        }
        if is_init && event.actor != Actor::System {
            return Err(CorpusError::Schema { line: line_no, message: "board_init must come from system".into() });
        }
        if !is_init && event.actor == Actor::System {
            return Err(CorpusError::Schema { line: line_no, message: "only board_init may come from system".into() });
        }
        events.push(event);
    }
    if events.is_empty() {
        return Err(CorpusError::MissingBoardInit);
    }
    Ok(Transcript::new(id, events))
}
