//! Transcripts, locative instances, follow-up labeling, and dataset splits.

mod replay;
mod store;
mod tagger;
mod transcript;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use replay::{replay, ReplayError};
pub use store::{load_corpus, load_transcripts_dir, read_jsonl, write_jsonl, CorpusGame, Manifest, ManifestEntry};
pub use tagger::{
    card_mentions, extract_cards, is_cardless_locative, is_followup_utterance, is_locative, tag_command_type,
    CommandType, ACTION_VERBS, FOLLOWUP_PATTERNS,
};
pub use transcript::{parse_transcript, Actor, BoardInit, EventKind, Transcript, TranscriptEvent};

use crate::card::Card;
use crate::engine::PlayerId;

pub const DEFAULT_FOLLOWUP_WINDOW: usize = 20;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("line {line}: seq is not strictly increasing")]
    NonMonotonicSeq { line: usize },
    #[error("transcript does not start with a board_init event")]
    MissingBoardInit,
    #[error("event {0} is not a player utterance")]
    NotAnUtterance(u64),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("split ratio {0} is outside (0, 1)")]
    InvalidRatio(f64),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    File { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    pub fn from_bool(positive: bool) -> Label {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocativeInstance {
    pub transcript_id: String,
    pub seq: u64,
    pub speaker: PlayerId,
    pub mentioned_card: Card,
    pub label: Label,
}

impl LocativeInstance {
    pub fn id(&self) -> String {
        format!("{}:{}:{}", self.transcript_id, self.seq, self.mentioned_card)
    }

    pub fn addressee(&self) -> PlayerId {
        self.speaker.other()
    }
}

/// Decides whether the addressee followed up on a locative utterance.
///
/// Scans at most `window` events after `seq`, stopping early at the next locative
/// utterance. The first decisive event wins: an addressee pickup of `mentioned` or
/// an addressee intention/clarification utterance is positive; a speaker pickup of
/// `mentioned` is negative. Nothing decisive is negative.
pub fn label_followup(transcript: &Transcript, seq: u64, mentioned: Card, window: usize) -> Result<Label, CorpusError> {
    let idx = transcript.position(seq).ok_or(CorpusError::NotAnUtterance(seq))?;
    let event = &transcript.events[idx];
    let (Some(speaker), Some(_)) = (event.actor.player(), event.utterance()) else {
        return Err(CorpusError::NotAnUtterance(seq));
    };
    let addressee = speaker.other();
    for next in transcript.events[idx + 1..].iter().take(window) {
        let Some(actor) = next.actor.player() else { continue };
        match &next.kind {
            EventKind::Utterance { text } => {
                if is_locative(text) {
                    break;
                }
                if actor == addressee && is_followup_utterance(text) {
                    return Ok(Label::Positive);
                }
            }
            EventKind::Pickup { card } if *card == mentioned => {
                return Ok(Label::from_bool(actor == addressee));
            }
            _ => {}
        }
    }
    Ok(Label::Negative)
}

/// One instance per card mentioned in each player locative utterance.
pub fn extract_instances(transcript: &Transcript, window: usize) -> Vec<LocativeInstance> {
    let mut out = Vec::new();
    for event in &transcript.events {
        let (Some(speaker), Some(text)) = (event.actor.player(), event.utterance()) else {
            continue;
        };
        if tag_command_type(text) != CommandType::Locative {
            continue;
        }
        for card in extract_cards(text) {
            let label = label_followup(transcript, event.seq, card, window).expect("player utterance");
            out.push(LocativeInstance {
                transcript_id: transcript.id.clone(),
                seq: event.seq,
                speaker,
                mentioned_card: card,
                label,
            });
        }
    }
    out
}

/// Seeded shuffle then cut: the first `round(ratio * n)` items train, the rest test.
pub fn split<T: Clone>(items: &[T], ratio: f64, seed: u64) -> Result<(Vec<T>, Vec<T>), CorpusError> {
    if items.is_empty() {
        return Err(CorpusError::EmptyDataset);
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(CorpusError::InvalidRatio(ratio));
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (ratio * items.len() as f64).round() as usize;
    let pick = |ix: &[usize]| ix.iter().map(|&i| items[i].clone()).collect::<Vec<T>>();
    Ok((pick(&order[..n_train]), pick(&order[n_train..])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::card;
    use crate::engine::{new_game, Action, GameConfig, GameState};

    fn game() -> GameState {
        let config = GameConfig { deck: vec![card("5H"), card("9C")], ..GameConfig::default() };
        let mut state = new_game(&config, 5).unwrap();
        // Put both players on the 5H so either can pick it up.
        let at = state.board.locate(card("5H")).unwrap();
        state.players[0].pos = at;
        state.players[1].pos = at;
        state
    }

    fn say(state: &mut GameState, who: PlayerId, text: &str) -> u64 {
        state.apply(who, &Action::Utter(text.into())).unwrap()
    }

    fn transcript(state: &GameState) -> Transcript {
        Transcript::new("t", state.event_log.clone())
    }

    #[test]
    fn addressee_pickup_is_positive() {
        let mut s = game();
        let seq = say(&mut s, PlayerId::P1, "there is a 5h in the very top left corner");
        say(&mut s, PlayerId::P2, "ok");
        say(&mut s, PlayerId::P1, "we need hearts");
        say(&mut s, PlayerId::P1, "hurry");
        s.apply(PlayerId::P2, &Action::Pickup(card("5H"))).unwrap();
        say(&mut s, PlayerId::P2, "ok i got it :)");
        assert_eq!(label_followup(&transcript(&s), seq, card("5H"), 20).unwrap(), Label::Positive);
    }

    #[test]
    fn speaker_pickup_is_negative() {
        let mut s = game();
        let seq = say(&mut s, PlayerId::P1, "there is a 5h in the very top left corner");
        s.apply(PlayerId::P1, &Action::Pickup(card("5H"))).unwrap();
        assert_eq!(label_followup(&transcript(&s), seq, card("5H"), 20).unwrap(), Label::Negative);
    }

    #[test]
    fn silence_is_negative() {
        let mut s = game();
        let seq = say(&mut s, PlayerId::P1, "there is a 5h in the very top left corner");
        say(&mut s, PlayerId::P2, "cool");
        assert_eq!(label_followup(&transcript(&s), seq, card("5H"), 20).unwrap(), Label::Negative);
    }

    #[test]
    fn clarification_is_positive() {
        let mut s = game();
        let seq = say(&mut s, PlayerId::P1, "there is a 5h in the very top left corner");
        say(&mut s, PlayerId::P2, "where exactly?");
        assert_eq!(label_followup(&transcript(&s), seq, card("5H"), 20).unwrap(), Label::Positive);
        // The speaker asking is not the addressee following up.
        let mut s = game();
        let seq = say(&mut s, PlayerId::P1, "there is a 5h in the very top left corner");
        say(&mut s, PlayerId::P1, "where exactly?");
        assert_eq!(label_followup(&transcript(&s), seq, card("5H"), 20).unwrap(), Label::Negative);
    }

    #[test]
    fn window_and_next_locative_bound_the_scan() {
        let mut s = game();
        let seq = say(&mut s, PlayerId::P1, "there is a 5h in the very top left corner");
        for _ in 0..3 {
            say(&mut s, PlayerId::P1, "hmm");
        }
        s.apply(PlayerId::P2, &Action::Pickup(card("5H"))).unwrap();
        let t = transcript(&s);
        assert_eq!(label_followup(&t, seq, card("5H"), 4).unwrap(), Label::Positive);
        assert_eq!(label_followup(&t, seq, card("5H"), 3).unwrap(), Label::Negative);

        let mut s = game();
        let seq = say(&mut s, PlayerId::P1, "there is a 5h in the very top left corner");
        say(&mut s, PlayerId::P1, "the 9c is in the middle");
        s.apply(PlayerId::P2, &Action::Pickup(card("5H"))).unwrap();
        assert_eq!(label_followup(&transcript(&s), seq, card("5H"), 20).unwrap(), Label::Negative);
    }

    #[test]
    fn non_utterance_is_rejected() {
        let s = game();
        assert!(matches!(
            label_followup(&transcript(&s), 1, card("5H"), 20),
            Err(CorpusError::NotAnUtterance(1))
        ));
        assert!(matches!(
            label_followup(&transcript(&s), 99, card("5H"), 20),
            Err(CorpusError::NotAnUtterance(99))
        ));
    }

    #[test]
    fn multi_card_locatives_yield_one_instance_per_card() {
        let mut s = game();
        say(&mut s, PlayerId::P1, "the 5h and 9c are near the bottom right");
        say(&mut s, PlayerId::P2, "on my way");
        let instances = extract_instances(&transcript(&s), 20);
        assert_eq!(instances.len(), 2);
        assert!(instances.iter().all(|i| i.label == Label::Positive && i.speaker == PlayerId::P1));
        assert_eq!(instances[0].id(), "t:2:5H");
    }

    #[test]
    fn split_sizes() {
        let items: Vec<u32> = (0..94).collect();
        let (train, test) = split(&items, 0.8, 1).unwrap();
        assert_eq!((train.len(), test.len()), (75, 19));
        let items: Vec<u32> = (0..10).collect();
        let (train, test) = split(&items, 0.8, 3).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        assert_eq!(split(&items, 0.8, 3).unwrap(), (train, test));
        assert!(matches!(split::<u32>(&[], 0.8, 1), Err(CorpusError::EmptyDataset)));
        assert!(matches!(split(&items, 1.0, 1), Err(CorpusError::InvalidRatio(_))));
    }
}
