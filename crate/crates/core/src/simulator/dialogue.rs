//! Utterance templates with small lexical variation pools.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::card::{Card, CardSet, Suit};
use crate::engine::Region;

const RANK_WORDS: [&str; 13] =
    ["ace", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "jack", "queen", "king"];

/// Compact lowercase form ("5h"). Aces of hearts and spades stay uppercase so
/// they are not read as the words "ah" and "as".
pub fn compact(card: Card) -> String {
    let s = card.to_string();
    if card.rank() == 1 && matches!(card.suit(), Suit::Hearts | Suit::Spades) {
        s
    } else {
        s.to_lowercase()
    }
}

fn spelled(card: Card) -> String {
    format!("{} of {}", RANK_WORDS[card.rank() as usize - 1], card.suit().name())
}

/// A card as players write it: mostly compact, sometimes uppercase or spelled out.
pub fn card_phrase<R: Rng>(card: Card, rng: &mut R) -> String {
    match rng.gen_range(0..10) {
        0 => card.to_string(),
        1 | 2 => spelled(card),
        _ => compact(card),
    }
}

pub fn card_list(cards: CardSet) -> String {
    let names: Vec<String> = cards.iter().map(compact).collect();
    match names.as_slice() {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

/// Preposition plus place, e.g. "in the very top left corner" or "on the left side".
fn place_phrase<R: Rng>(region: Region, rng: &mut R) -> String {
    let options: &[&str] = match region {
        Region::TopLeft => &["in the top left corner", "in the very top left corner", "in the top left", "at the top left"],
        Region::TopRight => &["in the top right corner", "in the very top right", "in the top right", "at the upper right"],
        Region::BottomLeft => &["in the bottom left corner", "in the bottom left", "at the lower left", "near the bottom left"],
        Region::BottomRight => &["in the bottom right corner", "in the bottom right", "at the very bottom right", "near the bottom right corner"],
        Region::Top => &["at the top", "in the top middle", "up at the top", "near the top"],
        Region::Bottom => &["at the bottom", "in the bottom middle", "down at the bottom", "near the bottom"],
        Region::Left => &["on the left side", "on the left", "over on the left side", "near the left edge"],
        Region::Right => &["on the right side", "on the right", "over on the right side", "near the right edge"],
        Region::Middle => &["in the middle", "in the center", "near the middle", "around the middle"],
    };
    options.choose(rng).expect("non-empty").to_string()
}

/// A locative about one card, in one of the attested shapes.
pub fn locative<R: Rng>(card: Card, region: Region, rng: &mut R) -> String {
    let c = card_phrase(card, rng);
    let place = place_phrase(region, rng);
    match rng.gen_range(0..6) {
        0 => format!("there is a {c} {place}"),
        1 => format!("the {c} is {place}"),
        2 => format!("there's a {c} {place}"),
        3 => format!("{c} is {place}"),
        4 => format!("there is also a {c} {place}"),
        _ => format!("the {c} is {place} btw"),
    }
}

/// Addressee replies that commit to fetching or ask where the card is.
pub const INTENTIONS: &[&str] = &["on my way", "ok i'll grab it", "i'll get it", "heading there now", "let me get it", "ok i'm going to get it"];
pub const CLARIFICATIONS: &[&str] = &["where exactly?", "which corner?", "whereabouts?", "where is it exactly"];
/// Replies that commit to nothing.
pub const NEUTRAL_ACKS: &[&str] = &["ok", "cool", "good to know", "nice", "k", "noted", "ok thanks"];

/// The speaker's answer to a clarification question. Never names the card, so it
/// is not itself a locative.
pub fn clarification_answer<R: Rng>(region: Region, rng: &mut R) -> String {
    let p = region.phrase();
    match rng.gen_range(0..3) {
        0 => format!("very {p}"),
        1 => format!("{p}, close to the edge"),
        _ => format!("{p} area"),
    }
}

pub fn hand_report<R: Rng>(hand: CardSet, rng: &mut R) -> String {
    if hand.is_empty() {
        return ["i have nothing yet", "my hand is empty"].choose(rng).unwrap().to_string();
    }
    let list = card_list(hand);
    match rng.gen_range(0..3) {
        0 => format!("i have {list}"),
        1 => format!("ok i have {list}"),
        _ => format!("i have {list} now"),
    }
}

pub fn suit_proposal<R: Rng>(suit: Suit, rng: &mut R) -> String {
    let s = suit.name();
    match rng.gen_range(0..3) {
        0 => format!("we should collect {s}"),
        1 => format!("maybe we go for {s}?"),
        _ => format!("i think {s} is our best bet"),
    }
}

pub fn suit_agreement<R: Rng>(suit: Suit, rng: &mut R) -> String {
    let s = suit.name();
    match rng.gen_range(0..3) {
        0 => format!("ok so we need to collect {s} then"),
        1 => format!("sounds good, {s} it is"),
        _ => format!("agreed, lets stick with {s}"),
    }
}

pub fn needs<R: Rng>(cards: CardSet, rng: &mut R) -> String {
    let list = card_list(cards);
    match rng.gen_range(0..3) {
        0 => format!("i still need {list}"),
        1 => format!("i need the {list}"),
        _ => format!("we need {list} for my part"),
    }
}

pub fn own_location<R: Rng>(region: Region, rng: &mut R) -> String {
    let p = region.phrase();
    match rng.gen_range(0..2) {
        0 => format!("i'm in the {p}"),
        _ => format!("i'm near the {p}"),
    }
}

pub fn imperative<R: Rng>(card: Card, region: Region, rng: &mut R) -> String {
    let c = card_phrase(card, rng);
    match rng.gen_range(0..4) {
        0 => format!("pick up the {c}"),
        1 => format!("grab the {c}"),
        2 => format!("go get the {c} in the {}", region.phrase()),
        _ => format!("get the {c} please"),
    }
}

pub fn performative<R: Rng>(card: Card, region: Region, rng: &mut R) -> String {
    let c = card_phrase(card, rng);
    match rng.gen_range(0..3) {
        0 => format!("can you get the {c}?"),
        1 => format!("you should grab the {c}"),
        _ => format!("could you pick up the {c} in the {}", region.phrase()),
    }
}

pub const COMMAND_ACKS: &[&str] = &["ok", "sure", "k", "alright"];

pub fn command_done(card: Card) -> String {
    format!("got the {}", compact(card))
}
