//! The Cards collaborative game world and a pragmatic-inference pipeline that
//! predicts when a locative utterance ("the 5H is in the top left corner") works
//! as an indirect request for the addressee to fetch the card.
//!
//! Modules, bottom up:
//! - [`card`], [`engine`]: cards and the deterministic game state machine.
//! - [`straights`]: winning straights and edit distance to the nearest one.
//! - [`commonground`]: the tabular common ground folded from annotations.
//! - [`corpus`]: transcripts, command tagging, follow-up labels, splits.
//! - [`features`], [`model`]: features, logistic regression, F1.
//! - [`simulator`]: synthetic games with ground-truth annotations.
//! - [`experiment`]: train/test runs over a corpus.
//! - [`agent`]: a live partner that interprets locatives and acts.

pub mod agent;
pub mod card;
pub mod commonground;
pub mod corpus;
pub mod engine;
pub mod experiment;
pub mod features;
pub mod model;
pub mod simulator;
pub mod straights;
