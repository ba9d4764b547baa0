//! Cards, suits, and compact card sets.
//!
//! Text encoding is rank (`A`, `2`..`9`, `T`, `J`, `Q`, `K`) followed by suit
//! (`C`, `D`, `H`, `S`), e.g. `5H` or `TH`. Parsing is case-insensitive and
//! also accepts `10` for the ten.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid card text {0:?}")]
pub struct ParseCardError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suit {
    Clubs,
    Diamonds,
    Hearts,
    Spades,
}

impl Suit {
    pub const ALL: [Suit; 4] = [Suit::Clubs, Suit::Diamonds, Suit::Hearts, Suit::Spades];

    pub fn code(self) -> char {
        match self {
            Suit::Clubs => 'C',
            Suit::Diamonds => 'D',
            Suit::Hearts => 'H',
            Suit::Spades => 'S',
        }
    }

    pub fn from_code(c: char) -> Option<Suit> {
        match c.to_ascii_uppercase() {
            'C' => Some(Suit::Clubs),
            'D' => Some(Suit::Diamonds),
            'H' => Some(Suit::Hearts),
            'S' => Some(Suit::Spades),
            _ => None,
        }
    }

    /// Plural English name, as used in dialogue ("hearts").
    pub fn name(self) -> &'static str {
        match self {
            Suit::Clubs => "clubs",
            Suit::Diamonds => "diamonds",
            Suit::Hearts => "hearts",
            Suit::Spades => "spades",
        }
    }

    fn index(self) -> u32 {
        self as u32
    }
}

impl fmt::Display for Suit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

impl FromStr for Suit {
    type Err = ParseCardError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Suit::from_code(c).ok_or_else(|| ParseCardError(s.to_string())),
            _ => {
                let lower = s.trim().to_ascii_lowercase();
                Suit::ALL
                    .into_iter()
                    .find(|suit| lower == suit.name() || lower == suit.name().trim_end_matches('s'))
                    .ok_or_else(|| ParseCardError(s.to_string()))
            }
        }
    }
}

impl Serialize for Suit {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Suit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub const MIN_RANK: u8 = 1;
pub const MAX_RANK: u8 = 13;

/// A playing card. Ordering is by suit, then rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Card {
    suit: Suit,
    rank: u8,
}

impl Card {
    pub fn new(suit: Suit, rank: u8) -> Option<Card> {
        (MIN_RANK..=MAX_RANK).contains(&rank).then_some(Card { suit, rank })
    }

    pub fn suit(self) -> Suit {
        self.suit
    }

    /// 1 = ace, 11 = jack, 12 = queen, 13 = king.
    pub fn rank(self) -> u8 {
        self.rank
    }

    /// Position in the canonical 52-card ordering (suit-major).
    pub fn index(self) -> u32 {
        self.suit.index() * 13 + (self.rank as u32 - 1)
    }

    pub fn from_index(index: u32) -> Option<Card> {
        if index >= 52 {
            return None;
        }
        let suit = Suit::ALL[(index / 13) as usize];
        Card::new(suit, (index % 13) as u8 + 1)
    }

    pub fn rank_code(self) -> char {
        match self.rank {
            1 => 'A',
            10 => 'T',
            11 => 'J',
            12 => 'Q',
            13 => 'K',
            r => (b'0' + r) as char,
        }
    }

    pub fn rank_from_code(s: &str) -> Option<u8> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Some(1),
            "T" | "10" => Some(10),
            "J" => Some(11),
            "Q" => Some(12),
            "K" => Some(13),
            d if d.len() == 1 => match d.as_bytes()[0] {
                b @ b'2'..=b'9' => Some(b - b'0'),
                _ => None,
            },
            _ => None,
        }
    }

    /// All 52 cards in canonical order.
    pub fn full_deck() -> Vec<Card> {
        (0..52).filter_map(Card::from_index).collect()
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.rank_code(), self.suit.code())
    }
}

impl FromStr for Card {
    type Err = ParseCardError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || ParseCardError(s.to_string());
        let suit_char = t.chars().last().ok_or_else(err)?;
        let suit = Suit::from_code(suit_char).ok_or_else(err)?;
        let rank = Card::rank_from_code(&t[..t.len() - suit_char.len_utf8()]).ok_or_else(err)?;
        Card::new(suit, rank).ok_or_else(err)
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of cards stored as a 52-bit mask. Iteration follows canonical card order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CardSet(u64);

impl CardSet {
    pub const EMPTY: CardSet = CardSet(0);

    pub fn new() -> CardSet {
        CardSet(0)
    }

    pub fn from_bits(bits: u64) -> CardSet {
        CardSet(bits & ((1u64 << 52) - 1))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, card: Card) -> bool {
        self.0 & (1 << card.index()) != 0
    }

    /// Returns true when the card was not already present.
    pub fn insert(&mut self, card: Card) -> bool {
        let fresh = !self.contains(card);
        self.0 |= 1 << card.index();
        fresh
    }

    /// Returns true when the card was present.
    pub fn remove(&mut self, card: Card) -> bool {
        let present = self.contains(card);
        self.0 &= !(1 << card.index());
        present
    }

    pub fn with(mut self, card: Card) -> CardSet {
        self.insert(card);
        self
    }

    pub fn union(self, other: CardSet) -> CardSet {
        CardSet(self.0 | other.0)
    }

    pub fn intersection(self, other: CardSet) -> CardSet {
        CardSet(self.0 & other.0)
    }

    pub fn difference(self, other: CardSet) -> CardSet {
        CardSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: CardSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: CardSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Card> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            Card::from_index(i)
        })
    }

    pub fn to_vec(self) -> Vec<Card> {
        self.iter().collect()
    }

    /// Parses a comma- or space-separated card list such as `2H,3H,4H`.
    pub fn parse_list(s: &str) -> Result<CardSet, ParseCardError> {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::parse::<Card>)
            .collect()
    }
}

impl FromIterator<Card> for CardSet {
    fn from_iter<I: IntoIterator<Item = Card>>(iter: I) -> Self {
        let mut set = CardSet::new();
        for card in iter {
            set.insert(card);
        }
        set
    }
}

impl Extend<Card> for CardSet {
    fn extend<I: IntoIterator<Item = Card>>(&mut self, iter: I) {
        for card in iter {
            self.insert(card);
        }
    }
}

impl fmt::Display for CardSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for CardSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for CardSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let cards = Vec::<Card>::deserialize(deserializer)?;
        Ok(cards.into_iter().collect())
    }
}

/// Shorthand for tests and examples: `cards("2H,3H")`. Panics on bad input.
pub fn cards(list: &str) -> CardSet {
    CardSet::parse_list(list).unwrap_or_else(|e| panic!("{e}"))
}

/// Shorthand for a single card: `card("5H")`. Panics on bad input.
pub fn card(text: &str) -> Card {
    text.parse().unwrap_or_else(|e| panic!("{e}"))
}
