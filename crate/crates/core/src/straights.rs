//! Winning straights and the pickup/drop edit distance from a pair of hands to
//! the nearest one.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::card::{Card, CardSet, Suit};
use crate::engine::HAND_CAPACITY;

pub const STRAIGHT_LEN: u8 = 6;
/// Highest low rank of a window; aces are low only, so the top window is 8..K.
pub const MAX_LOW_RANK: u8 = 13 - STRAIGHT_LEN + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Straight {
    pub suit: Suit,
    /// Lowest rank in the window; the straight covers `lo..lo + 6`.
    pub lo: u8,
}

impl Straight {
    pub fn new(suit: Suit, lo: u8) -> Option<Straight> {
        (1..=MAX_LOW_RANK).contains(&lo).then_some(Straight { suit, lo })
    }

    pub fn cards(self) -> CardSet {
        (self.lo..self.lo + STRAIGHT_LEN)
            .filter_map(|rank| Card::new(self.suit, rank))
            .collect()
    }

    pub fn contains(self, card: Card) -> bool {
        card.suit() == self.suit && (self.lo..self.lo + STRAIGHT_LEN).contains(&card.rank())
    }
}

impl fmt::Display for Straight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = Card::new(self.suit, self.lo).expect("valid window");
        let hi = Card::new(self.suit, self.lo + STRAIGHT_LEN - 1).expect("valid window");
        write!(f, "{lo}..{hi}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StraightError {
    #[error("invalid hands {hand1} / {hand2}: each holds at most three cards and they must be disjoint")]
    InvalidHand { hand1: CardSet, hand2: CardSet },
    #[error("no straight can be completed from the available cards")]
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditResult {
    pub cost: u32,
    /// Every straight achieving `cost`, in enumeration order.
    pub optimal_straights: Vec<Straight>,
}

/// All 32 straights, ordered by suit (C, D, H, S) then low rank.
pub fn enumerate_straights() -> Vec<Straight> {
    Suit::ALL
        .into_iter()
        .flat_map(|suit| (1..=MAX_LOW_RANK).map(move |lo| Straight { suit, lo }))
        .collect()
}

fn validate(hand1: CardSet, hand2: CardSet) -> Result<(), StraightError> {
    if hand1.len() > HAND_CAPACITY || hand2.len() > HAND_CAPACITY || !hand1.is_disjoint(hand2) {
        return Err(StraightError::InvalidHand { hand1, hand2 });
    }
    Ok(())
}

/// Pickups of missing straight cards plus drops of held cards outside the straight.
///
/// The cost does not depend on which player ends up holding which cards: with
/// both hands capped at three, some split of the six cards is always reachable
/// with exactly these edits.
pub fn straight_cost(straight: Straight, hand1: CardSet, hand2: CardSet) -> Result<u32, StraightError> {
    validate(hand1, hand2)?;
    Ok(cost_unchecked(straight.cards(), hand1.union(hand2)))
}

fn cost_unchecked(target: CardSet, held: CardSet) -> u32 {
    (target.difference(held).len() + held.difference(target).len()) as u32
}

/// Minimal edit cost over all straights, with every straight that attains it.
///
/// When `available` is given, only straights whose missing cards all lie in
/// `available` are considered.
pub fn edit_distance(
    hand1: CardSet,
    hand2: CardSet,
    available: Option<CardSet>,
) -> Result<EditResult, StraightError> {
    validate(hand1, hand2)?;
    let held = hand1.union(hand2);
    let mut best: Option<EditResult> = None;
    for straight in enumerate_straights() {
        let target = straight.cards();
        if let Some(avail) = available {
            if !target.difference(held).is_subset(avail) {
                continue;
            }
        }
        let cost = cost_unchecked(target, held);
        match &mut best {
            Some(b) if cost > b.cost => {}
            Some(b) if cost == b.cost => b.optimal_straights.push(straight),
            _ => best = Some(EditResult { cost, optimal_straights: vec![straight] }),
        }
    }
    best.ok_or(StraightError::Infeasible)
}

/// The straight formed by the two hands together, if they make one exactly.
pub fn winning_straight(hand1: CardSet, hand2: CardSet) -> Option<Straight> {
    if hand1.len() != HAND_CAPACITY || hand2.len() != HAND_CAPACITY || !hand1.is_disjoint(hand2) {
        return None;
    }
    let held = hand1.union(hand2);
    enumerate_straights().into_iter().find(|s| s.cards() == held)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::{card, cards};

    fn straight(text: &str) -> Straight {
        let lo = card(text);
        Straight::new(lo.suit(), lo.rank()).unwrap()
    }

    #[test]
    fn enumeration_order_and_size() {
        let all = enumerate_straights();
        assert_eq!(all.len(), 32);
        assert_eq!(all[0], Straight { suit: Suit::Clubs, lo: 1 });
        assert_eq!(all[0].cards(), cards("AC,2C,3C,4C,5C,6C"));
        assert_eq!(all[31].to_string(), "8S..KS");
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn enumeration_matches_brute_force_windows() {
        // Every 6-card same-suit set whose ranks are consecutive, found by scanning all rank subsets.
        let mut windows = Vec::new();
        for suit in Suit::ALL {
            for mask in 0u32..(1 << 13) {
                if mask.count_ones() != 6 {
                    continue;
                }
                let lo = mask.trailing_zeros();
                if mask >> lo == 0b111111 {
                    windows.push((suit, lo as u8 + 1));
                }
            }
        }
        assert_eq!(windows.len(), 32);
        let ours: Vec<_> = enumerate_straights().iter().map(|s| (s.suit, s.lo)).collect();
        assert_eq!(ours, windows);
    }

    #[test]
    fn no_straight_spans_two_and_nine() {
        assert!(!enumerate_straights()
            .iter()
            .any(|s| s.contains(card("2H")) && s.contains(card("9H"))));
    }

    #[test]
    fn worked_example_costs() {
        let s = straight("2H");
        assert_eq!(straight_cost(s, cards("2H,3H,4H"), cards("6H,7H")).unwrap(), 1);
        assert_eq!(straight_cost(s, cards("2H,3H,4H"), cards("5H,6H,7H")).unwrap(), 0);
        assert_eq!(straight_cost(s, cards("2H,3H,4H"), cards("6H,7H,QD")).unwrap(), 2);
    }

    #[test]
    fn invalid_hands() {
        let s = straight("2H");
        assert!(matches!(
            straight_cost(s, cards("2H,3H,4H,5H"), CardSet::new()),
            Err(StraightError::InvalidHand { .. })
        ));
        assert!(matches!(
            edit_distance(cards("2H"), cards("2H"), None),
            Err(StraightError::InvalidHand { .. })
        ));
    }

    #[test]
    fn edit_distance_examples() {
        let r = edit_distance(cards("2H,3H,4H"), cards("6H,7H"), None).unwrap();
        assert_eq!(r.cost, 1);
        assert_eq!(r.optimal_straights, vec![straight("2H")]);

        let r = edit_distance(CardSet::new(), CardSet::new(), None).unwrap();
        assert_eq!(r.cost, 6);
        assert_eq!(r.optimal_straights.len(), 32);

        let r = edit_distance(cards("2H,3H,QD"), cards("5S"), None).unwrap();
        assert_eq!(r.cost, 6);
        assert!(r.optimal_straights.iter().all(|s| s.contains(card("2H")) && s.contains(card("3H"))));
        assert_eq!(r.optimal_straights, vec![straight("AH"), straight("2H")]);
    }

    #[test]
    fn availability_restricts_candidates() {
        let r = edit_distance(cards("3H,4H,5H"), cards("6H,7H"), None).unwrap();
        assert_eq!(r.optimal_straights, vec![straight("2H"), straight("3H")]);
        let r = edit_distance(cards("3H,4H,5H"), cards("6H,7H"), Some(cards("8H"))).unwrap();
        assert_eq!(r.cost, 1);
        assert_eq!(r.optimal_straights, vec![straight("3H")]);
        assert_eq!(
            edit_distance(cards("2H,3H,4H"), cards("6H,7H"), Some(cards("8H"))),
            Err(StraightError::Infeasible)
        );
        let r = edit_distance(cards("2H,3H,4H"), cards("5H,6H,7H"), Some(CardSet::new())).unwrap();
        assert_eq!(r.cost, 0);
        assert_eq!(
            edit_distance(cards("2H"), CardSet::new(), Some(CardSet::new())),
            Err(StraightError::Infeasible)
        );
    }

    #[test]
    fn winning_straight_requires_three_and_three() {
        assert_eq!(winning_straight(cards("2H,3H,4H"), cards("5H,6H,7H")), Some(straight("2H")));
        assert_eq!(winning_straight(cards("2H,3H,4H,5H"), cards("6H,7H")), None);
        assert_eq!(winning_straight(cards("2H,3H,4H"), cards("5H,6H,8H")), None);
    }
}
