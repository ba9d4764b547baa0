//! A live partner that reads locative utterances as possible requests and acts on
//! them: classify, locate the card, walk there, pick it up, confirm.

mod tracker;
mod view;

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use tracker::{annotations_for, region_place, CgTracker};
pub use view::{plan_path, AgentView};

use crate::card::{Card, CardSet};
use crate::commonground::{CardStatus, CommonGround};
use crate::corpus::{extract_cards, is_cardless_locative, tag_command_type, CommandType};
use crate::engine::{Action, ActionError, Coord, Direction, GameConfig, PlayerId, Region, VisibleCell, HAND_CAPACITY};
use crate::features::{AddresseeRule, ContextFeatures, FeatureName};
use crate::model::LogRegModel;
use crate::straights::enumerate_straights;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("no known path to {0}")]
    Unreachable(Coord),
    #[error("{0} is off the board")]
    OutOfBounds(Coord),
    #[error("model feature {0:?} is not a common-ground feature")]
    UnsupportedModel(String),
}

/// What the agent makes of a partner utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Interpretation {
    /// Go to `target`, drop `drop` first if the hand is full, and pick up `card`.
    Act { card: Card, target: Coord, drop: Option<Card>, probability: f64 },
    Acknowledge { card: Option<Card>, probability: Option<f64>, reply: Option<String> },
    Clarify { card: Option<Card>, reply: String },
    Ignore,
}

impl Interpretation {
    pub fn reply(&self) -> Option<&str> {
        match self {
            Interpretation::Act { .. } | Interpretation::Ignore => None,
            Interpretation::Acknowledge { reply, .. } => reply.as_deref(),
            Interpretation::Clarify { reply, .. } => Some(reply),
        }
    }
}

pub const CONFIRMATION: &str = "ok i got it :)";
const ACK_REPLY: &str = "ok good to know";
const WHERE_REPLY: &str = "where exactly?";
const WHICH_REPLY: &str = "which card do you mean?";
const FULL_REPLY: &str = "i can't, my hand is full of cards we need";

/// The common-ground features a model was trained on, in its column order.
pub fn model_features(model: &LogRegModel) -> Result<Vec<FeatureName>, AgentError> {
    model
        .feature_names
        .iter()
        .map(|n| n.parse::<FeatureName>().map_err(|_| AgentError::UnsupportedModel(n.clone())))
        .collect()
}

/// The suit the team is working on: the agreed one, else the mentioned card's.
fn goal_relevant(card: Card, mentioned: Card, cg: &CommonGround) -> bool {
    let goal = cg.agreed_suit.unwrap_or(mentioned.suit());
    card.suit() == goal
        && card.suit() == mentioned.suit()
        && enumerate_straights().iter().any(|s| s.contains(card) && s.contains(mentioned))
}

/// Card to discard before picking up `mentioned`, or `Err(())` when every held
/// card is still wanted.
fn choose_drop(hand: CardSet, mentioned: Card, cg: &CommonGround) -> Result<Option<Card>, ()> {
    if hand.len() < HAND_CAPACITY {
        return Ok(None);
    }
    let goal = cg.agreed_suit.unwrap_or(mentioned.suit());
    let mut spare: Vec<Card> = hand.iter().filter(|c| !goal_relevant(*c, mentioned, cg)).collect();
    // Off-suit cards go first, then the lowest-ranked.
    spare.sort_by_key(|c| (c.suit() == goal, c.rank()));
    spare.first().copied().map(Some).ok_or(())
}

fn locate(card: Card, cg: &CommonGround, view: &AgentView, utterance: &str) -> Option<Coord> {
    if let Some(at) = view.seen.get(&card) {
        return Some(*at);
    }
    let centroid = |r: Region| r.centroid(view.width, view.height);
    if let CardStatus::KnownAt(place) = cg.card_fact(card) {
        if let Some(at) = place.at {
            return Some(at);
        }
        if let Some(region) = place.region.as_deref().and_then(Region::find_in) {
            return Some(centroid(region));
        }
    }
    Region::find_in(utterance).map(centroid)
}

/// Reads one partner utterance addressed to `me`. Deterministic in its inputs.
pub fn interpret_locative(
    model: &LogRegModel,
    cg: &CommonGround,
    view: &AgentView,
    me: PlayerId,
    utterance: &str,
) -> Result<Interpretation, AgentError> {
    let names = model_features(model)?;
    if is_cardless_locative(utterance) {
        return Ok(Interpretation::Clarify { card: None, reply: WHICH_REPLY.into() });
    }
    if tag_command_type(utterance) != CommandType::Locative {
        return Ok(Interpretation::Ignore);
    }
    let Some(card) = extract_cards(utterance).into_iter().find(|c| !view.hand.contains(*c)) else {
        return Ok(Interpretation::Clarify { card: None, reply: WHICH_REPLY.into() });
    };
    let features = ContextFeatures::compute(cg, card, me.other(), AddresseeRule::default());
    let p = model
        .predict_proba(&features.select(&names))
        .map_err(|_| AgentError::UnsupportedModel(model.feature_names.join(",")))?;
    if p < model.hyperparams.threshold {
        return Ok(Interpretation::Acknowledge { card: Some(card), probability: Some(p), reply: Some(ACK_REPLY.into()) });
    }
    let Ok(drop) = choose_drop(view.hand, card, cg) else {
        return Ok(Interpretation::Acknowledge { card: Some(card), probability: Some(p), reply: Some(FULL_REPLY.into()) });
    };
    match locate(card, cg, view, utterance) {
        Some(target) => Ok(Interpretation::Act { card, target, drop, probability: p }),
        None => Ok(Interpretation::Clarify { card: Some(card), reply: WHERE_REPLY.into() }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Fetch {
    card: Card,
    /// Best current guess of where the card lies.
    target: Coord,
    /// Where the search started; unexplored cells are visited nearest-first from here.
    origin: Coord,
    drop: Option<Card>,
}

/// The agent seated in a live game. Feed it observations and utterances; ask it
/// for its next action.
#[derive(Debug, Clone)]
pub struct PartnerAgent {
    pub me: PlayerId,
    model: LogRegModel,
    view: AgentView,
    tracker: CgTracker,
    observed: BTreeSet<Coord>,
    task: Option<Fetch>,
    outbox: VecDeque<String>,
    last: Option<Interpretation>,
}

impl PartnerAgent {
    pub fn new(me: PlayerId, model: LogRegModel, config: &GameConfig, start: Coord) -> Result<PartnerAgent, AgentError> {
        model_features(&model)?;
        Ok(PartnerAgent {
            me,
            model,
            view: AgentView::new(config.width, config.height, start),
            tracker: CgTracker::new(),
            observed: BTreeSet::new(),
            task: None,
            outbox: VecDeque::new(),
            last: None,
        })
    }

    pub fn view(&self) -> &AgentView {
        &self.view
    }

    pub fn common_ground(&self) -> &CommonGround {
        &self.tracker.cg
    }

    pub fn last_interpretation(&self) -> Option<&Interpretation> {
        self.last.as_ref()
    }

    pub fn is_busy(&self) -> bool {
        self.task.is_some() || !self.outbox.is_empty()
    }

    /// Own position, hand, and neighbourhood after any state change.
    pub fn observe(&mut self, pos: Coord, hand: CardSet, cells: &[VisibleCell]) {
        let had = self.view.hand;
        self.view.pos = pos;
        self.view.hand = hand;
        self.view.observe(cells);
        self.observed.extend(cells.iter().map(|c| c.at));
        if let Some(task) = &self.task {
            if hand.contains(task.card) && !had.contains(task.card) {
                self.task = None;
                self.outbox.push_back(CONFIRMATION.into());
                self.outbox.push_back(hand_announcement(hand));
            }
        }
    }

    pub fn on_bump(&mut self, at: Coord, dir: Direction) {
        self.view.record_bump(at, dir);
    }

    /// Reports an engine rejection of the agent's last action.
    pub fn on_error(&mut self, err: &ActionError) {
        match err {
            ActionError::NoSuchCardHere(card) => {
                self.view.seen.remove(card);
            }
            ActionError::BudgetExhausted => {
                if self.task.take().is_some() {
                    self.outbox.push_back("i'm out of moves".into());
                }
            }
            _ => self.task = None,
        }
    }

    /// Any utterance in the game, including the agent's own.
    pub fn hear(&mut self, speaker: PlayerId, text: &str) -> Option<Interpretation> {
        self.tracker.observe(speaker, text);
        if speaker == self.me {
            return None;
        }
        let interp = interpret_locative(&self.model, &self.tracker.cg, &self.view, self.me, text)
            .expect("model features validated at construction");
        match &interp {
            Interpretation::Act { card, target, drop, .. } => {
                self.task = Some(Fetch { card: *card, target: *target, origin: *target, drop: *drop });
                self.outbox.push_back("on my way".into());
            }
            other => {
                if let Some(reply) = other.reply() {
                    self.outbox.push_back(reply.to_string());
                }
            }
        }
        self.last = Some(interp.clone());
        Some(interp)
    }

    /// Next action to submit, or `None` when idle.
    pub fn next_action(&mut self) -> Option<Action> {
        if let Some(text) = self.outbox.pop_front() {
            return Some(Action::Utter(text));
        }
        loop {
            let task = self.task.as_mut()?;
            if let Some(at) = self.view.seen.get(&task.card) {
                task.target = *at;
            }
            let exact = self.view.seen.contains_key(&task.card);
            if exact && self.view.pos == task.target {
                if self.view.hand.len() >= HAND_CAPACITY {
                    match task.drop.filter(|c| self.view.hand.contains(*c)) {
                        Some(card) => return Some(Action::Drop(card)),
                        None => {
                            self.task = None;
                            return Some(Action::Utter(FULL_REPLY.into()));
                        }
                    }
                }
                return Some(Action::Pickup(task.card));
            }
            if !exact && self.observed.contains(&task.target) {
                // Nothing there: move on to the nearest cell not yet seen.
                let origin = task.origin;
                match self.next_search_cell(origin) {
                    Some(next) => {
                        self.task.as_mut()?.target = next;
                        continue;
                    }
                    None => {
                        self.task = None;
                        return Some(Action::Utter("i can't find it".into()));
                    }
                }
            }
            match plan_path(&self.view, task.target) {
                Ok(path) if !path.is_empty() => return Some(Action::Move(path[0])),
                _ => {
                    self.observed.insert(task.target);
                    if exact {
                        self.view.seen.remove(&task.card);
                    }
                }
            }
        }
    }

    fn next_search_cell(&self, origin: Coord) -> Option<Coord> {
        (0..self.view.height)
            .flat_map(|y| (0..self.view.width).map(move |x| Coord::new(x, y)))
            .filter(|c| !self.observed.contains(c))
            .min_by_key(|c| (c.chebyshev(origin), c.y, c.x))
    }
}

/// "i have 3h, 4h and ks" style announcement of a hand.
pub fn hand_announcement(hand: CardSet) -> String {
    let names: Vec<String> = hand.iter().map(|c| c.to_string().to_lowercase()).collect();
    match names.as_slice() {
        [] => "i have nothing yet".into(),
        [one] => format!("i have {one}"),
        [init @ .., last] => format!("i have {} and {last}", init.join(", ")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::{card, cards, Suit};
    use crate::model::Hyperparams;

    fn model(names: &[&str], weights: Vec<f64>, bias: f64) -> LogRegModel {
        LogRegModel {
            feature_names: names.iter().map(|s| s.to_string()).collect(),
            weights,
            bias,
            hyperparams: Hyperparams::default(),
            vocab_ref: None,
        }
    }

    fn full_hands_model() -> LogRegModel {
        model(&["edit_distance", "explicit_goal", "full_hands"], vec![-0.1, 0.5, 6.0], -2.0)
    }

    fn motivating_cg() -> CommonGround {
        let mut cg = CommonGround::default();
        cg.hands_belief = [Some(cards("3H,4H,6H")), Some(cards("KS,2C"))];
        cg.agreed_suit = Some(Suit::Hearts);
        cg
    }

    fn view() -> AgentView {
        let mut v = AgentView::new(20, 15, Coord::new(10, 7));
        v.hand = cards("KS,2C");
        v
    }

    const LOCATIVE: &str = "there is a 5h in the very top left corner";

    #[test]
    fn motivating_example_acts() {
        let got = interpret_locative(&full_hands_model(), &motivating_cg(), &view(), PlayerId::P2, LOCATIVE).unwrap();
        let Interpretation::Act { card: c, target, drop, probability } = got else { panic!("{got:?}") };
        assert_eq!(c, card("5H"));
        assert_eq!(target, Region::TopLeft.centroid(20, 15));
        assert_eq!(drop, None);
        assert!(probability > 0.5);
    }

    #[test]
    fn low_probability_acknowledges() {
        let m = model(&["full_hands"], vec![1.0], -5.0);
        let got = interpret_locative(&m, &motivating_cg(), &view(), PlayerId::P2, LOCATIVE).unwrap();
        assert!(matches!(got, Interpretation::Acknowledge { card: Some(_), .. }), "{got:?}");
    }

    #[test]
    fn cardless_and_non_locative() {
        let m = full_hands_model();
        let cg = motivating_cg();
        let got = interpret_locative(&m, &cg, &view(), PlayerId::P2, "the card is over there").unwrap();
        assert!(matches!(got, Interpretation::Clarify { card: None, .. }));
        let got = interpret_locative(&m, &cg, &view(), PlayerId::P2, "pick up the 5h").unwrap();
        assert_eq!(got, Interpretation::Ignore);
    }

    #[test]
    fn unlocated_card_asks_where() {
        let got =
            interpret_locative(&full_hands_model(), &motivating_cg(), &view(), PlayerId::P2, "the 5h is around here").unwrap();
        assert!(matches!(got, Interpretation::Clarify { card: Some(_), .. }), "{got:?}");
    }

    #[test]
    fn full_hand_of_goal_cards_reports_inability() {
        let mut v = view();
        v.hand = cards("7H,8H,9H");
        let mut cg = motivating_cg();
        cg.hands_belief[1] = Some(v.hand);
        let m = model(&["explicit_goal"], vec![5.0], -1.0);
        let got = interpret_locative(&m, &cg, &v, PlayerId::P2, LOCATIVE).unwrap();
        assert_eq!(got.reply(), Some(FULL_REPLY));

        v.hand = cards("7H,8H,KS");
        let got = interpret_locative(&m, &cg, &v, PlayerId::P2, LOCATIVE).unwrap();
        assert!(matches!(got, Interpretation::Act { drop: Some(c), .. } if c == card("KS")));
    }

    #[test]
    fn bigram_models_are_rejected() {
        let m = model(&["b0"], vec![1.0], 0.0);
        assert!(matches!(
            interpret_locative(&m, &motivating_cg(), &view(), PlayerId::P2, LOCATIVE),
            Err(AgentError::UnsupportedModel(_))
        ));
    }

    #[test]
    fn announcement_format() {
        assert_eq!(hand_announcement(CardSet::new()), "i have nothing yet");
        assert_eq!(hand_announcement(cards("5H")), "i have 5h");
        assert_eq!(hand_announcement(cards("3H,4H,KS")), "i have 3h, 4h and ks");
    }
}
