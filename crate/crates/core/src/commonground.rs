//! Simplified tabular common ground: what both players have publicly established
//! about hands, locations, cards, strategy, and ability to act.
//!
//! The common ground at an utterance is a left fold of annotation events over an
//! empty table. Each event overwrites one field group; later assertions win.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::card::{Card, CardSet, Suit};
use crate::corpus::Transcript;
use crate::engine::{Coord, PlayerId, HAND_CAPACITY};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommonGroundError {
    #[error("invalid annotation event at seq {seq}: {reason}")]
    InvalidEvent { seq: u64, reason: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("annotation refers to seq {0}, which is not in the transcript")]
    DanglingSeq(u64),
}

/// A described location: a free-form region name, an exact cell, or both.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Place {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Coord>,
}

impl Place {
    pub fn region(name: impl Into<String>) -> Place {
        Place { region: Some(name.into()), at: None }
    }

    pub fn cell(at: Coord) -> Place {
        Place { region: None, at: Some(at) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "status", content = "place", rename_all = "snake_case")]
pub enum CardStatus {
    #[default]
    Unknown,
    ExistsSomewhere,
    KnownAt(Place),
    Absent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommonGround {
    /// `None` until the player's hand has been stated.
    pub hands_belief: [Option<CardSet>; 2],
    pub locations: [Option<Place>; 2],
    pub card_facts: BTreeMap<Card, CardStatus>,
    pub agreed_suit: Option<Suit>,
    pub needed: [CardSet; 2],
    pub can_act: [bool; 2],
}

impl Default for CommonGround {
    fn default() -> Self {
        CommonGround {
            hands_belief: [None, None],
            locations: [None, None],
            card_facts: BTreeMap::new(),
            agreed_suit: None,
            needed: [CardSet::new(), CardSet::new()],
            can_act: [true, true],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Annotation {
    HandIs { player: PlayerId, cards: CardSet },
    LocationIs { player: PlayerId, place: Place },
    CardFactIs { card: Card, fact: CardStatus },
    SuitAgreed { suit: Suit },
    Needs { player: PlayerId, cards: CardSet },
    CanAct { player: PlayerId, value: bool },
}

/// One line of an annotation file: `{seq, asserter, kind, payload}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationEvent {
    /// Transcript event this assertion is anchored to.
    pub seq: u64,
    pub asserter: PlayerId,
    #[serde(flatten)]
    pub fact: Annotation,
}

impl AnnotationEvent {
    pub fn new(seq: u64, asserter: PlayerId, fact: Annotation) -> AnnotationEvent {
        AnnotationEvent { seq, asserter, fact }
    }

    pub fn validate(&self) -> Result<(), CommonGroundError> {
        if let Annotation::HandIs { cards, .. } = &self.fact {
            if cards.len() > HAND_CAPACITY {
                return Err(CommonGroundError::InvalidEvent {
                    seq: self.seq,
                    reason: format!("hand {cards} has more than three cards"),
                });
            }
        }
        Ok(())
    }
}

impl CommonGround {
    pub fn hand(&self, p: PlayerId) -> Option<CardSet> {
        self.hands_belief[p.index()]
    }

    /// Stated hand, or the empty set when nothing has been said.
    pub fn hand_or_empty(&self, p: PlayerId) -> CardSet {
        self.hand(p).unwrap_or_default()
    }

    pub fn needed(&self, p: PlayerId) -> CardSet {
        self.needed[p.index()]
    }

    pub fn can_act(&self, p: PlayerId) -> bool {
        self.can_act[p.index()]
    }

    pub fn location(&self, p: PlayerId) -> Option<&Place> {
        self.locations[p.index()].as_ref()
    }

    pub fn card_fact(&self, card: Card) -> &CardStatus {
        static UNKNOWN: CardStatus = CardStatus::Unknown;
        self.card_facts.get(&card).unwrap_or(&UNKNOWN)
    }

    /// Applies one event in place. On error nothing changes.
    pub fn apply(&mut self, ev: &AnnotationEvent) -> Result<(), CommonGroundError> {
        ev.validate()?;
        match &ev.fact {
            Annotation::HandIs { player, cards } => {
                let i = player.index();
                self.hands_belief[i] = Some(*cards);
                self.needed[i] = self.needed[i].difference(*cards);
            }
            Annotation::LocationIs { player, place } => self.locations[player.index()] = Some(place.clone()),
            Annotation::CardFactIs { card, fact } => {
                self.card_facts.insert(*card, fact.clone());
            }
            Annotation::SuitAgreed { suit } => self.agreed_suit = Some(*suit),
            Annotation::Needs { player, cards } => {
                let i = player.index();
                self.needed[i] = cards.difference(self.hands_belief[i].unwrap_or_default());
            }
            Annotation::CanAct { player, value } => self.can_act[player.index()] = *value,
        }
        Ok(())
    }
}

pub fn apply_annotation_event(cg: &CommonGround, ev: &AnnotationEvent) -> Result<CommonGround, CommonGroundError> {
    let mut next = cg.clone();
    next.apply(ev)?;
    Ok(next)
}

/// Common ground established by all events anchored at or before `seq`.
/// `annotations` must be sorted by seq.
pub fn snapshot_at(annotations: &[AnnotationEvent], seq: u64) -> CommonGround {
    let mut cg = CommonGround::default();
    for ev in annotations.iter().take_while(|ev| ev.seq <= seq) {
        // Events that fail validation carry no public commitment.
        let _ = cg.apply(ev);
    }
    cg
}

/// Parses an annotation JSONL file. Events must be valid and sorted by seq.
pub fn parse_annotations(text: &str) -> Result<Vec<AnnotationEvent>, CommonGroundError> {
    let mut out: Vec<AnnotationEvent> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let ev: AnnotationEvent = serde_json::from_str(line)
            .map_err(|e| CommonGroundError::Parse { line: line_no, message: e.to_string() })?;
        ev.validate()
            .map_err(|e| CommonGroundError::Parse { line: line_no, message: e.to_string() })?;
        if out.last().is_some_and(|prev| prev.seq > ev.seq) {
            return Err(CommonGroundError::Parse { line: line_no, message: "events are not sorted by seq".into() });
        }
        out.push(ev);
    }
    Ok(out)
}

pub fn annotations_to_jsonl(annotations: &[AnnotationEvent]) -> String {
    annotations
        .iter()
        .map(|ev| serde_json::to_string(ev).expect("annotations serialize") + "\n")
        .collect()
}

/// Every annotation must be anchored to an event that exists in the transcript.
pub fn validate_against(annotations: &[AnnotationEvent], transcript: &Transcript) -> Result<(), CommonGroundError> {
    match annotations.iter().find(|ev| transcript.event(ev.seq).is_none()) {
        Some(ev) => Err(CommonGroundError::DanglingSeq(ev.seq)),
        None => Ok(()),
    }
}
