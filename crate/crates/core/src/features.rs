//! Common-ground features and the bigram baseline features for a locative instance.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::card::{Card, CardSet};
use crate::commonground::CommonGround;
use crate::corpus::{Label, LocativeInstance};
use crate::engine::{PlayerId, HAND_CAPACITY};
use crate::straights::{edit_distance, enumerate_straights};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureName {
    EditDistance,
    ExplicitGoal,
    FullHands,
}

impl FeatureName {
    pub const ALL: [FeatureName; 3] = [FeatureName::EditDistance, FeatureName::ExplicitGoal, FeatureName::FullHands];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureName::EditDistance => "edit_distance",
            FeatureName::ExplicitGoal => "explicit_goal",
            FeatureName::FullHands => "full_hands",
        }
    }

    /// Parses a comma-separated list such as `full_hands,explicit_goal`.
    pub fn parse_list(s: &str) -> Result<Vec<FeatureName>, String> {
        s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect()
    }
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown feature {s:?}"))
    }
}

/// How the "but the addressee does not" clause of Full Hands is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AddresseeRule {
    /// The addressee fails the same three-same-suit-straight test as the speaker.
    #[default]
    Mirror,
    /// The addressee's hand is not known to be full.
    NotFull,
}

/// Lowercases, splits on whitespace, and strips punctuation from token edges.
/// Tokens made only of punctuation (emoticons like `:)`) are kept whole.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|raw| {
            let lower = raw.to_lowercase();
            let stripped = lower.trim_matches(|c: char| !c.is_alphanumeric());
            if stripped.is_empty() {
                lower
            } else {
                stripped.to_string()
            }
        })
        .collect()
}

fn utterance_bigrams(text: &str) -> impl Iterator<Item = (String, String)> {
    let mut tokens = vec![BOS.to_string()];
    tokens.extend(tokenize(text));
    tokens.push(EOS.to_string());
    let pairs: Vec<(String, String)> = tokens.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    pairs.into_iter()
}

/// Bigram ids, dense `0..len()`, assigned in sorted bigram order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BigramVocabulary {
    ids: BTreeMap<(String, String), usize>,
}

impl BigramVocabulary {
    /// Builds from training dialogue histories only.
    pub fn build<'a, I, H>(histories: I) -> BigramVocabulary
    where
        I: IntoIterator<Item = H>,
        H: IntoIterator<Item = &'a str>,
    {
        let mut pairs: BTreeMap<(String, String), usize> = BTreeMap::new();
        for history in histories {
            for text in history {
                for pair in utterance_bigrams(text) {
                    pairs.insert(pair, 0);
                }
            }
        }
        for (i, id) in pairs.values_mut().enumerate() {
            *id = i;
        }
        BigramVocabulary { ids: pairs }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, a: &str, b: &str) -> Option<usize> {
        self.ids.get(&(a.to_string(), b.to_string())).copied()
    }

    /// Bigrams in id order.
    pub fn pairs(&self) -> Vec<(String, String)> {
        self.ids.keys().cloned().collect()
    }
}

impl Serialize for BigramVocabulary {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.ids.keys())
    }
}

impl<'de> Deserialize<'de> for BigramVocabulary {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs = Vec::<(String, String)>::deserialize(deserializer)?;
        let ids: BTreeMap<_, _> = pairs.into_iter().enumerate().map(|(i, p)| (p, i)).collect();
        if ids.values().enumerate().any(|(i, id)| i != *id) {
            return Err(serde::de::Error::custom("vocabulary pairs must be sorted and distinct"));
        }
        Ok(BigramVocabulary { ids })
    }
}

pub type SparseVector = BTreeMap<usize, f64>;

/// Bigram counts over every utterance in `history`, each wrapped in boundary
/// markers. Bigrams outside the vocabulary are dropped.
pub fn bigram_features<S: AsRef<str>>(history: &[S], vocab: &BigramVocabulary) -> SparseVector {
    let mut counts = SparseVector::new();
    for text in history {
        for (a, b) in utterance_bigrams(text.as_ref()) {
            if let Some(id) = vocab.ids.get(&(a, b)) {
                *counts.entry(*id).or_insert(0.0) += 1.0;
            }
        }
    }
    counts
}

/// Stated hands with any overlap removed from P2's side, so that contradictory
/// stale reports still form a valid pair.
fn believed_hands(cg: &CommonGround) -> (CardSet, CardSet) {
    let h1 = cg.hand_or_empty(PlayerId::P1);
    let h2 = cg.hand_or_empty(PlayerId::P2).difference(h1);
    (h1, h2)
}

/// Minimal pickup/drop edits from the stated hands to a winning straight.
/// Hands nobody has described count as empty.
pub fn feat_edit_distance(cg: &CommonGround) -> f64 {
    let (h1, h2) = believed_hands(cg);
    edit_distance(h1, h2, None).map(|r| r.cost as f64).expect("believed hands are valid")
}

pub fn feat_explicit_goal(cg: &CommonGround, mentioned: Card, addressee: PlayerId) -> f64 {
    let suit_match = cg.agreed_suit == Some(mentioned.suit());
    let needed = cg.needed(addressee).contains(mentioned);
    if suit_match || needed {
        1.0
    } else {
        0.0
    }
}

/// A full stated hand of `mentioned`'s suit that, together with `mentioned`,
/// fits inside some winning straight.
fn holds_run_for(hand: Option<CardSet>, mentioned: Card) -> bool {
    let Some(hand) = hand else { return false };
    if hand.len() != HAND_CAPACITY || hand.iter().any(|c| c.suit() != mentioned.suit()) {
        return false;
    }
    let needed = hand.with(mentioned);
    enumerate_straights().iter().any(|s| needed.is_subset(s.cards()))
}

pub fn feat_full_hands(
    cg: &CommonGround,
    mentioned: Card,
    speaker: PlayerId,
    addressee: PlayerId,
    rule: AddresseeRule,
) -> f64 {
    let speaker_ok = holds_run_for(cg.hand(speaker), mentioned);
    let addressee_blocked = match rule {
        AddresseeRule::Mirror => holds_run_for(cg.hand(addressee), mentioned),
        AddresseeRule::NotFull => cg.hand(addressee).is_some_and(|h| h.len() >= HAND_CAPACITY),
    };
    if speaker_ok && !addressee_blocked {
        1.0
    } else {
        0.0
    }
}

/// All three common-ground features for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContextFeatures {
    pub edit_distance: f64,
    pub explicit_goal: f64,
    pub full_hands: f64,
}

impl ContextFeatures {
    pub fn compute(cg: &CommonGround, mentioned: Card, speaker: PlayerId, rule: AddresseeRule) -> ContextFeatures {
        let addressee = speaker.other();
        ContextFeatures {
            edit_distance: feat_edit_distance(cg),
            explicit_goal: feat_explicit_goal(cg, mentioned, addressee),
            full_hands: feat_full_hands(cg, mentioned, speaker, addressee, rule),
        }
    }

    pub fn get(&self, name: FeatureName) -> f64 {
        match name {
            FeatureName::EditDistance => self.edit_distance,
            FeatureName::ExplicitGoal => self.explicit_goal,
            FeatureName::FullHands => self.full_hands,
        }
    }

    pub fn select(&self, names: &[FeatureName]) -> Vec<f64> {
        names.iter().map(|n| self.get(*n)).collect()
    }
}

/// One line of a feature dump: `{instance_id, dense: {name: value}, sparse: {id: count}, label}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub instance_id: String,
    pub dense: BTreeMap<String, f64>,
    #[serde(default)]
    pub sparse: SparseVector,
    pub label: Label,
}

impl FeatureRow {
    pub fn new(instance: &LocativeInstance, context: &ContextFeatures, sparse: SparseVector) -> FeatureRow {
        FeatureRow {
            instance_id: instance.id(),
            dense: FeatureName::ALL.iter().map(|n| (n.to_string(), context.get(*n))).collect(),
            sparse,
            label: instance.label,
        }
    }

    /// Dense values for `names`, in that order; absent names read as 0.
    pub fn dense_values(&self, names: &[FeatureName]) -> Vec<f64> {
        names
            .iter()
            .map(|n| self.dense.get(n.as_str()).copied().unwrap_or(0.0))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::{card, cards, Suit};

    fn cg_with(h1: Option<&str>, h2: Option<&str>) -> CommonGround {
        let mut cg = CommonGround::default();
        cg.hands_belief = [h1.map(cards), h2.map(cards)];
        cg
    }

    #[test]
    fn tokenizer_rules() {
        assert_eq!(tokenize("There is a 5H!"), ["there", "is", "a", "5h"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("ok i got it :)"), ["ok", "i", "got", "it", ":)"]);
        assert_eq!(tokenize("3h,4h,6h"), ["3h,4h,6h"]);
    }

    #[test]
    fn bigrams_with_boundaries() {
        let vocab = BigramVocabulary::build([vec!["go north"]]);
        assert_eq!(vocab.len(), 3);
        let v = bigram_features(&["go north"], &vocab);
        let expect: SparseVector = [
            (vocab.id(BOS, "go").unwrap(), 1.0),
            (vocab.id("go", "north").unwrap(), 1.0),
            (vocab.id("north", EOS).unwrap(), 1.0),
        ]
        .into_iter()
        .collect();
        assert_eq!(v, expect);
        assert_eq!(bigram_features(&["go north", "go north"], &vocab).values().sum::<f64>(), 6.0);
        // Unseen bigrams vanish.
        let v = bigram_features(&["go south"], &vocab);
        assert_eq!(v.len(), 1);
        assert!(v.keys().all(|id| *id < vocab.len()));
    }

    #[test]
    fn vocabulary_serializes_in_id_order() {
        let vocab = BigramVocabulary::build([vec!["b a", "a b"]]);
        let json = serde_json::to_string(&vocab).unwrap();
        let back: BigramVocabulary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vocab);
        assert!(serde_json::from_str::<BigramVocabulary>(r#"[["b","a"],["a","b"]]"#).is_err());
    }

    #[test]
    fn edit_distance_feature() {
        assert_eq!(feat_edit_distance(&cg_with(Some("2H,3H,4H"), Some("6H,7H"))), 1.0);
        assert_eq!(feat_edit_distance(&cg_with(None, None)), 6.0);
        assert_eq!(feat_edit_distance(&cg_with(Some("2H,3H,4H"), Some("5H,6H,7H"))), 0.0);
    }

    #[test]
    fn explicit_goal_feature() {
        let mut cg = CommonGround::default();
        assert_eq!(feat_explicit_goal(&cg, card("5H"), PlayerId::P2), 0.0);
        cg.agreed_suit = Some(Suit::Hearts);
        assert_eq!(feat_explicit_goal(&cg, card("5H"), PlayerId::P2), 1.0);
        let mut cg = CommonGround::default();
        cg.needed[PlayerId::P2.index()] = cards("5H");
        assert_eq!(feat_explicit_goal(&cg, card("5H"), PlayerId::P2), 1.0);
        assert_eq!(feat_explicit_goal(&cg, card("5H"), PlayerId::P1), 0.0);
    }

    #[test]
    fn full_hands_feature() {
        use PlayerId::*;
        let fh = |cg: &CommonGround, m: &str| feat_full_hands(cg, card(m), P1, P2, AddresseeRule::Mirror);
        assert_eq!(fh(&cg_with(Some("3H,4H,6H"), Some("QD,AC")), "5H"), 1.0);
        assert_eq!(fh(&cg_with(Some("3H,4H,QD"), Some("QD,AC")), "5H"), 0.0);
        assert_eq!(fh(&cg_with(Some("2H,7H,KH"), None), "5H"), 0.0);
        // Mentioned card must fit the run too: 3..6 plus 9 spans seven ranks.
        assert_eq!(fh(&cg_with(Some("3H,4H,6H"), None), "9H"), 0.0);
        // Addressee holding its own fitting run blocks the feature under the mirror reading.
        assert_eq!(fh(&cg_with(Some("3H,4H,6H"), Some("7H,8H,9H")), "5H"), 0.0);
        let not_full = |cg: &CommonGround| feat_full_hands(cg, card("5H"), P1, P2, AddresseeRule::NotFull);
        assert_eq!(not_full(&cg_with(Some("3H,4H,6H"), Some("QD,AC"))), 1.0);
        assert_eq!(not_full(&cg_with(Some("3H,4H,6H"), Some("QD,AC,2S"))), 0.0);
        assert_eq!(fh(&cg_with(Some("3H,4H,6H"), Some("QD,AC,2S")), "5H"), 1.0);
    }

    #[test]
    fn full_hands_brute_force_over_straights() {
        // Speaker {2H,7H,KH}: no 6-wide window holds ranks 2, 7 and 13.
        let ranks = [2u8, 7, 13];
        let brute = (1u8..=8).any(|lo| ranks.iter().all(|r| (lo..lo + 6).contains(r)));
        assert!(!brute);
    }
}
