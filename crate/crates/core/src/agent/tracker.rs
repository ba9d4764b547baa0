use once_cell::sync::Lazy;
use regex::Regex;

use crate::card::{CardSet, Suit};
use crate::commonground::{Annotation, AnnotationEvent, CardStatus, CommonGround, Place};
use crate::corpus::{extract_cards, tag_command_type, CommandType};
use crate::engine::{PlayerId, Region, HAND_CAPACITY};

static SUIT_PLAN: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r"\b(?:collect|go for|going for|do|stick with|stick to|focus on|get)\s+(?:the\s+)?(clubs|diamonds|hearts|spades)\b")
        .unwrap()
});

static HAND_REPORT: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^(?:ok\s+|so\s+|now\s+)*(?:i have|i've got|ive got|i hold|my hand is|my cards are)\b").unwrap());

static EMPTY_HAND: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"\b(?:i have nothing|my hand is empty|i have no cards|empty hand)\b").unwrap());

static OWN_LOCATION: Lazy<Regex> = Lazy::new(|| Regex::new(r"^(?:i'm|im|i am)\s+(?:in|at|on|near)\b").unwrap());

static NO_MOVES: Lazy<Regex> = Lazy::new(|| Regex::new(r"\b(?:out of moves|can't move|cant move)\b").unwrap());

/// Regions are recorded by their hyphenated phrase, e.g. "top-left".
pub fn region_place(r: Region) -> Place {
    Place::region(r.phrase().replace(' ', "-"))
}

/// Template-level reading of one utterance into common-ground facts. Covers the
/// phrasings the simulator and agent produce plus close variants; anything else
/// contributes nothing.
pub fn annotations_for(speaker: PlayerId, text: &str) -> Vec<Annotation> {
    let t = text.trim().to_lowercase();
    let cards = extract_cards(&t);
    let mut out = Vec::new();
    if tag_command_type(&t) == CommandType::Locative {
        let fact = match Region::find_in(&t) {
            Some(r) => CardStatus::KnownAt(region_place(r)),
            None => CardStatus::ExistsSomewhere,
        };
        out.extend(cards.iter().map(|c| Annotation::CardFactIs { card: *c, fact: fact.clone() }));
        return out;
    }
    if t.contains("need") && !cards.is_empty() {
        out.push(Annotation::Needs { player: speaker, cards: cards.iter().copied().collect() });
    } else if EMPTY_HAND.is_match(&t) {
        out.push(Annotation::HandIs { player: speaker, cards: CardSet::new() });
    } else if HAND_REPORT.is_match(&t) && !cards.is_empty() && cards.len() <= HAND_CAPACITY {
        out.push(Annotation::HandIs { player: speaker, cards: cards.iter().copied().collect() });
    }
    if let Some(caps) = SUIT_PLAN.captures(&t) {
        let suit: Suit = caps[1].parse().expect("suit names in the pattern parse");
        out.push(Annotation::SuitAgreed { suit });
    }
    if OWN_LOCATION.is_match(&t) {
        if let Some(r) = Region::find_in(&t) {
            out.push(Annotation::LocationIs { player: speaker, place: region_place(r) });
        }
    }
    if NO_MOVES.is_match(&t) {
        out.push(Annotation::CanAct { player: speaker, value: false });
    }
    out
}

/// Live common ground built from the dialogue as it happens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CgTracker {
    pub cg: CommonGround,
    pub events: Vec<AnnotationEvent>,
    utterances: u64,
}

impl CgTracker {
    pub fn new() -> CgTracker {
        CgTracker { cg: CommonGround::default(), events: Vec::new(), utterances: 0 }
    }

    /// Folds one utterance in. Annotation seqs count utterances heard, from 1.
    pub fn observe(&mut self, speaker: PlayerId, text: &str) {
        self.utterances += 1;
        for fact in annotations_for(speaker, text) {
            let ev = AnnotationEvent::new(self.utterances, speaker, fact);
            if self.cg.apply(&ev).is_ok() {
                self.events.push(ev);
            }
        }
    }
}
