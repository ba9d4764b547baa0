//! Rule-based command-type tagging and card-expression extraction.

use once_cell::sync::Lazy;
use regex::{Regex, RegexSet};
use serde::{Deserialize, Serialize};

use crate::card::{Card, Suit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandType {
    Imperative,
    Performative,
    Locative,
    None,
}

/// Verbs that open an imperative or, with a second-person agent, a performative.
pub const ACTION_VERBS: &[&str] = &[
    "pick", "grab", "get", "take", "drop", "keep", "keepp", "go", "come", "move", "head", "tell", "talk", "find",
    "search", "look", "collect", "bring", "hold", "put", "let", "check", "try", "stay", "wait", "dont", "don't",
    "give", "leave", "meet", "walk", "explore", "ditch", "toss", "swap", "trade", "fetch",
];

/// Leading tokens skipped before looking for an imperative verb ("ok so grab it").
const DISCOURSE_MARKERS: &[&str] = &[
    "ok", "okay", "k", "kk", "so", "or", "and", "hell", "then", "now", "well", "alright", "oh", "no", "yes", "yeah",
    "hey", "please", "pls", "plz", "just", "awesome", "great", "cool", "um", "uh", "hmm", "also", "oops", "sure",
];

const SECOND_PERSON: &[&str] = &["you", "your", "yours", "u", "ya", "youre", "you're", "yourself", "yall", "y'all", "ur"];

/// Phrases by which an addressee commits to fetching a card or asks where it is.
pub const FOLLOWUP_PATTERNS: &[&str] = &[
    r"\bi(?:'ll|ll| will| can| am going to|'m going to|m going to|'m gonna|m gonna| am gonna) (?:go )?(?:get|grab|pick|fetch|go|head|take)\b",
    r"\blet me (?:get|grab|go|fetch)\b",
    r"\bon (?:my|the) way\b",
    r"\bheading (?:there|over|that way)\b",
    r"\bi got it\b",
    r"\bwhere (?:is|exactly|abouts|in|at|about)\b",
    r"\bwhereabouts\b",
    r"\bexactly where\b",
    r"\bwhich (?:corner|side|part|one)\b",
    r"\bhow far\b",
    r"\bwhere\s*\?",
];

static FOLLOWUP_SET: Lazy<RegexSet> = Lazy::new(|| RegexSet::new(FOLLOWUP_PATTERNS).expect("valid patterns"));

static COMPACT_CARD: Lazy<Regex> = Lazy::new(|| Regex::new(r"(?i)\b(10|[2-9akqjt])([cdhs])\b").unwrap());

static SPELLED_CARD: Lazy<Regex> = Lazy::new(|| {
    Regex::new(
        r"(?i)\b(ace|two|three|four|five|six|seven|eight|nine|ten|jack|queen|king|10|[2-9akqj])s?\s+of\s+(clubs?|diamonds?|hearts?|spades?|[cdhs])\b",
    )
    .unwrap()
});

static CARD_LIST: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"CARD(?:\s*(?:,|and|&|\+|or)\s*(?:(?:the|a|an)\s+)?CARD)+").unwrap());

const PLACE_PREP: &str = r"(?:in|at|near|on|by|around|next\s+to|up|down|over|inside)";

static COPULAR_LOCATIVE: Lazy<Regex> = Lazy::new(|| {
    Regex::new(&format!(r"\bCARD(?:\s+\w+)?(?:\s+(?:is|are|was|were)|'s)\s+(?:\w+\s+){{0,2}}?{PLACE_PREP}\b\W*\w"))
        .unwrap()
});

static EXISTENTIAL_LOCATIVE: Lazy<Regex> = Lazy::new(|| {
    Regex::new(&format!(
        r"\bthere(?:'s|s|\s+is|\s+are|\s+was|\s+were)\s+(?:(?:a|an|the|one|also|another|still)\s+)*CARD\s+(?:\w+\s+){{0,2}}?{PLACE_PREP}\b\W*\w"
    ))
    .unwrap()
});

/// Locative shape with a pronoun or generic noun where the card should be.
static CARDLESS_LOCATIVE: Lazy<Regex> = Lazy::new(|| {
    Regex::new(&format!(
        r"\b(?:it|that|this|one|card|cards|they|there)(?:'s|\s+(?:is|are|was|were))\s+(?:\w+\s+){{0,2}}?{PLACE_PREP}\b"
    ))
    .unwrap()
});

fn spelled_rank(word: &str) -> Option<u8> {
    let rank = match word.to_ascii_lowercase().as_str() {
        "ace" | "a" => 1,
        "two" => 2,
        "three" => 3,
        "four" => 4,
        "five" => 5,
        "six" => 6,
        "seven" => 7,
        "eight" => 8,
        "nine" => 9,
        "ten" | "10" => 10,
        "jack" | "j" => 11,
        "queen" | "q" => 12,
        "king" | "k" => 13,
        other => return Card::rank_from_code(other),
    };
    Some(rank)
}

/// Card mentions with their byte spans, in text order.
pub fn card_mentions(text: &str) -> Vec<(std::ops::Range<usize>, Card)> {
    let mut found: Vec<(std::ops::Range<usize>, Card)> = Vec::new();
    for caps in SPELLED_CARD.captures_iter(text) {
        let m = caps.get(0).unwrap();
        let suit_word = &caps[2];
        let suit = suit_word.parse::<Suit>().ok();
        if let (Some(rank), Some(suit)) = (spelled_rank(&caps[1]), suit) {
            if let Some(card) = Card::new(suit, rank) {
                found.push((m.range(), card));
            }
        }
    }
    for m in COMPACT_CARD.find_iter(text) {
        // Lowercase "as" and "ah" are nearly always English words.
        if matches!(m.as_str(), "as" | "ah") {
            continue;
        }
        if found.iter().any(|(r, _)| r.start < m.end() && m.start() < r.end) {
            continue;
        }
        if let Ok(card) = m.as_str().parse::<Card>() {
            found.push((m.range(), card));
        }
    }
    found.sort_by_key(|(r, _)| r.start);
    found
}

/// Distinct cards mentioned in `text`, in order of first mention.
pub fn extract_cards(text: &str) -> Vec<Card> {
    let mut out: Vec<Card> = Vec::new();
    for (_, card) in card_mentions(text) {
        if !out.contains(&card) {
            out.push(card);
        }
    }
    out
}

fn words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric() && c != '\'').to_lowercase())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Lowercased text with each card expression replaced by `CARD` and card lists collapsed.
fn with_card_placeholders(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for (range, _) in card_mentions(text) {
        out.push_str(&text[last..range.start].to_lowercase());
        out.push_str("CARD");
        last = range.end;
    }
    out.push_str(&text[last..].to_lowercase());
    CARD_LIST.replace_all(&out, "CARD").into_owned()
}

fn has_second_person(tokens: &[String]) -> bool {
    tokens.iter().any(|t| SECOND_PERSON.contains(&t.as_str()))
}

fn is_action_verb(token: &str) -> bool {
    ACTION_VERBS.contains(&token)
}

/// True for "the 5H is in the top left corner"-shaped utterances that mention a card
/// and name no second-person agent.
pub fn is_locative(text: &str) -> bool {
    let tokens = words(text);
    if has_second_person(&tokens) {
        return false;
    }
    let norm = with_card_placeholders(text);
    COPULAR_LOCATIVE.is_match(&norm) || EXISTENTIAL_LOCATIVE.is_match(&norm)
}

/// Locative-shaped but with no card expression ("the card is over there").
pub fn is_cardless_locative(text: &str) -> bool {
    let tokens = words(text);
    !has_second_person(&tokens) && card_mentions(text).is_empty() && CARDLESS_LOCATIVE.is_match(&text.to_lowercase())
}

pub fn tag_command_type(text: &str) -> CommandType {
    let tokens = words(text);
    let first = tokens.iter().find(|t| !DISCOURSE_MARKERS.contains(&t.as_str()));
    if first.is_some_and(|t| is_action_verb(t)) {
        return CommandType::Imperative;
    }
    if is_locative(text) {
        return CommandType::Locative;
    }
    if has_second_person(&tokens) && tokens.iter().any(|t| is_action_verb(t)) {
        return CommandType::Performative;
    }
    CommandType::None
}

/// Whether an addressee utterance signals intent to act or asks where the card is.
pub fn is_followup_utterance(text: &str) -> bool {
    FOLLOWUP_SET.is_match(&text.to_lowercase())
}
