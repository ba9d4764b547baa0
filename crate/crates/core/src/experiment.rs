//! End-to-end runs: featurize a corpus, split it, train every system, score F1.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::commonground::{snapshot_at, AnnotationEvent};
use crate::corpus::{split, CorpusError, CorpusGame, LocativeInstance, Transcript};
use crate::features::{bigram_features, AddresseeRule, BigramVocabulary, ContextFeatures, FeatureName, FeatureRow};
use crate::model::{evaluate, random_baseline, train, train_sparse, EvalReport, Hyperparams, LogRegModel, ModelError};
use crate::simulator::{FollowupRule, GeneratedGame};

/// F1 (percent) reported in the original study for each system, kept for
/// comparison in reports. Synthetic runs are not expected to reproduce them.
pub const REFERENCE_F1: [(&str, f64); 6] = [
    ("random", 23.5),
    ("bigram", 58.9),
    ("edit_distance", 62.5),
    ("explicit_goal", 76.2),
    ("full_hands", 82.3),
    ("all_features", 77.7),
];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A locative instance with everything a system may look at.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub instance: LocativeInstance,
    pub context: ContextFeatures,
    /// Utterances up to and including the locative.
    pub history: Vec<String>,
}

impl Example {
    pub fn positive(&self) -> bool {
        self.instance.label.is_positive()
    }
}

/// Features for every instance of one game, read off the annotation snapshot at
/// each locative.
pub fn featurize_game(
    transcript: &Transcript,
    annotations: &[AnnotationEvent],
    instances: &[LocativeInstance],
    rule: AddresseeRule,
) -> Vec<Example> {
    instances
        .iter()
        .map(|inst| {
            let cg = snapshot_at(annotations, inst.seq);
            Example {
                instance: inst.clone(),
                context: ContextFeatures::compute(&cg, inst.mentioned_card, inst.speaker, rule),
                history: transcript.utterances_through(inst.seq).into_iter().map(str::to_string).collect(),
            }
        })
        .collect()
}

pub fn featurize_corpus(games: &[CorpusGame], rule: AddresseeRule) -> Vec<Example> {
    games
        .iter()
        .flat_map(|g| featurize_game(&g.transcript, &g.annotations, &g.instances, rule))
        .collect()
}

pub fn featurize_generated(games: &[GeneratedGame], rule: AddresseeRule) -> Vec<Example> {
    games
        .iter()
        .flat_map(|g| featurize_game(&g.transcript, &g.annotations, &g.instances, rule))
        .collect()
}

/// Dense-plus-sparse rows in the on-disk feature format.
pub fn feature_rows(examples: &[Example], vocab: &BigramVocabulary) -> Vec<FeatureRow> {
    examples
        .iter()
        .map(|e| FeatureRow::new(&e.instance, &e.context, bigram_features(&e.history, vocab)))
        .collect()
}

pub fn build_vocab(examples: &[Example]) -> BigramVocabulary {
    BigramVocabulary::build(examples.iter().map(|e| e.history.iter().map(String::as_str)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub split_ratio: f64,
    pub seed: u64,
    pub hyperparams: Hyperparams,
    /// Rule that generated the labels, if known; scored as the noiseless oracle.
    pub oracle: Option<FollowupRule>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { split_ratio: 0.8, seed: 0, hyperparams: Hyperparams::default(), oracle: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemResult {
    pub system: String,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n_train: usize,
    pub n_test: usize,
    pub train_positive_rate: f64,
    pub results: Vec<SystemResult>,
}

impl ExperimentReport {
    pub fn f1(&self, system: &str) -> Option<f64> {
        self.results.iter().find(|r| r.system == system).map(|r| r.report.f1)
    }
}

/// The dense-feature systems in report order.
pub fn feature_systems() -> Vec<(String, Vec<FeatureName>)> {
    use FeatureName::*;
    vec![
        ("edit_distance".into(), vec![EditDistance]),
        ("explicit_goal".into(), vec![ExplicitGoal]),
        ("full_hands".into(), vec![FullHands]),
        ("explicit_goal+full_hands".into(), vec![ExplicitGoal, FullHands]),
        ("all_features".into(), vec![EditDistance, ExplicitGoal, FullHands]),
    ]
}

pub fn train_dense(train_set: &[Example], names: &[FeatureName], hp: &Hyperparams) -> Result<LogRegModel, ModelError> {
    let x: Vec<Vec<f64>> = train_set.iter().map(|e| e.context.select(names)).collect();
    let y: Vec<bool> = train_set.iter().map(Example::positive).collect();
    Ok(train(&x, &y, hp)?.with_feature_names(names.iter().map(|n| n.to_string()).collect()))
}

pub fn evaluate_dense(model: &LogRegModel, test: &[Example], names: &[FeatureName]) -> Result<EvalReport, ModelError> {
    let preds = test.iter().map(|e| model.predict(&e.context.select(names))).collect::<Result<Vec<_>, _>>()?;
    let gold: Vec<bool> = test.iter().map(Example::positive).collect();
    evaluate(&preds, &gold)
}

/// Runs random, bigram, every feature system, and (if configured) the oracle.
pub fn run_experiment(examples: &[Example], cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let (train_set, test) = split(examples, cfg.split_ratio, cfg.seed)?;
    let gold: Vec<bool> = test.iter().map(Example::positive).collect();
    let train_labels: Vec<bool> = train_set.iter().map(Example::positive).collect();
    let mut results = Vec::new();

    let random = random_baseline(&train_labels, test.len(), cfg.seed)?;
    results.push(SystemResult { system: "random".into(), report: evaluate(&random, &gold)? });

    let vocab = build_vocab(&train_set);
    let xs: Vec<_> = train_set.iter().map(|e| bigram_features(&e.history, &vocab)).collect();
    let bigram = train_sparse(&xs, vocab.len(), &train_labels, &cfg.hyperparams)?;
    let preds: Vec<bool> = test.iter().map(|e| bigram.predict_sparse(&bigram_features(&e.history, &vocab))).collect();
    results.push(SystemResult { system: "bigram".into(), report: evaluate(&preds, &gold)? });

    for (name, features) in feature_systems() {
        let model = train_dense(&train_set, &features, &cfg.hyperparams)?;
        results.push(SystemResult { system: name, report: evaluate_dense(&model, &test, &features)? });
    }

    if let Some(rule) = &cfg.oracle {
        let preds: Vec<bool> = test.iter().map(|e| rule.eval(&e.context)).collect();
        results.push(SystemResult { system: "oracle".into(), report: evaluate(&preds, &gold)? });
    }

    let positives = train_labels.iter().filter(|y| **y).count();
    Ok(ExperimentReport {
        n_train: train_set.len(),
        n_test: test.len(),
        train_positive_rate: positives as f64 / train_labels.len().max(1) as f64,
        results,
    })
}
