//! Binary logistic regression trained by full-batch gradient descent, the
//! class-prior random baseline, and F1 evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::SparseVector;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in training input")]
    NonFiniteInput,
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {preds} predictions vs {gold} gold labels")]
    LengthMismatch { preds: usize, gold: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Initial weights are drawn uniformly from `[-init_scale, init_scale]`; 0 means zeros.
    #[serde(default)]
    pub init_scale: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            learning_rate: 0.1,
            l2_lambda: 1e-3,
            epochs: 2000,
            seed: 0,
            init_scale: 0.0,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub feature_names: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyperparams: Hyperparams,
    /// Path of the bigram vocabulary the sparse weights are indexed by, if any.
    #[serde(default)]
    pub vocab_ref: Option<String>,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Training rows in sparse form; dense rows are stored with their non-zeros only.
#[derive(Debug, Clone)]
struct Design {
    rows: Vec<Vec<(usize, f64)>>,
    dim: usize,
}

impl Design {
    fn dense(x: &[Vec<f64>]) -> Result<Design, ModelError> {
        let dim = x.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(x.len());
        for row in x {
            if row.len() != dim {
                return Err(ModelError::DimensionMismatch { expected: dim, got: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(ModelError::NonFiniteInput);
            }
            rows.push(row.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect());
        }
        Ok(Design { rows, dim })
    }

    fn sparse(x: &[SparseVector], dim: usize) -> Result<Design, ModelError> {
        let mut rows = Vec::with_capacity(x.len());
        for row in x {
            if let Some((&id, _)) = row.iter().next_back().filter(|(id, _)| **id >= dim) {
                return Err(ModelError::DimensionMismatch { expected: dim, got: id + 1 });
            }
            if row.values().any(|v| !v.is_finite()) {
                return Err(ModelError::NonFiniteInput);
            }
            rows.push(row.iter().map(|(k, v)| (*k, *v)).collect());
        }
        Ok(Design { rows, dim })
    }

    fn logit(&self, i: usize, w: &[f64], b: f64) -> f64 {
        self.rows[i].iter().map(|(j, v)| w[*j] * v).sum::<f64>() + b
    }

    /// Mean negative log-likelihood plus `lambda/2 * |w|^2` (bias unregularized).
    fn loss(&self, y: &[bool], w: &[f64], b: f64, lambda: f64) -> f64 {
        let n = self.rows.len() as f64;
        let nll: f64 = (0..self.rows.len())
            .map(|i| {
                let z = self.logit(i, w, b);
                softplus(z) - if y[i] { z } else { 0.0 }
            })
            .sum();
        nll / n + 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, y: &[bool], w: &[f64], b: f64, lambda: f64) -> (Vec<f64>, f64) {
        let n = self.rows.len() as f64;
        let mut gw = vec![0.0; self.dim];
        let mut gb = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            let residual = sigmoid(self.logit(i, w, b)) - if y[i] { 1.0 } else { 0.0 };
            for (j, v) in row {
                gw[*j] += residual * v;
            }
            gb += residual;
        }
        for (g, wj) in gw.iter_mut().zip(w) {
            *g = *g / n + lambda * wj;
        }
        (gw, gb / n)
    }

    /// Upper bound on the gradient's Lipschitz constant. Steps above its
    /// inverse can diverge on long count vectors.
    fn smoothness(&self, lambda: f64) -> f64 {
        let n = self.rows.len().max(1) as f64;
        let mean_sq: f64 = self.rows.iter().map(|r| 1.0 + r.iter().map(|(_, v)| v * v).sum::<f64>()).sum::<f64>() / n;
        0.25 * mean_sq + lambda
    }

    fn fit(&self, y: &[bool], hp: &Hyperparams) -> (Vec<f64>, f64) {
        let (mut w, mut b) = initial_params(self.dim, hp);
        let step = hp.learning_rate.min(1.0 / self.smoothness(hp.l2_lambda));
        for _ in 0..hp.epochs {
            let (gw, gb) = self.gradient(y, &w, b, hp.l2_lambda);
            for (wj, g) in w.iter_mut().zip(&gw) {
                *wj -= step * g;
            }
            b -= step * gb;
        }
        (w, b)
    }
}

fn initial_params(dim: usize, hp: &Hyperparams) -> (Vec<f64>, f64) {
    if hp.init_scale == 0.0 {
        return (vec![0.0; dim], 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let s = hp.init_scale;
    let w = (0..dim).map(|_| rng.gen_range(-s..=s)).collect();
    (w, rng.gen_range(-s..=s))
}

fn check_labels(n_rows: usize, y: &[bool]) -> Result<(), ModelError> {
    if n_rows == 0 {
        return Err(ModelError::EmptyInput);
    }
    if n_rows != y.len() {
        return Err(ModelError::DimensionMismatch { expected: n_rows, got: y.len() });
    }
    Ok(())
}

/// Regularized loss for dense inputs.
pub fn loss(x: &[Vec<f64>], y: &[bool], w: &[f64], b: f64, lambda: f64) -> Result<f64, ModelError> {
    check_labels(x.len(), y)?;
    let design = Design::dense(x)?;
    if w.len() != design.dim {
        return Err(ModelError::DimensionMismatch { expected: design.dim, got: w.len() });
    }
    Ok(design.loss(y, w, b, lambda))
}

/// Analytic gradient of [`loss`] with respect to `(w, b)`.
pub fn gradient(x: &[Vec<f64>], y: &[bool], w: &[f64], b: f64, lambda: f64) -> Result<(Vec<f64>, f64), ModelError> {
    check_labels(x.len(), y)?;
    let design = Design::dense(x)?;
    if w.len() != design.dim {
        return Err(ModelError::DimensionMismatch { expected: design.dim, got: w.len() });
    }
    Ok(design.gradient(y, w, b, lambda))
}

/// Trains on dense rows. Feature names default to `x0, x1, ...`.
pub fn train(x: &[Vec<f64>], y: &[bool], hp: &Hyperparams) -> Result<LogRegModel, ModelError> {
    check_labels(x.len(), y)?;
    let design = Design::dense(x)?;
    let (weights, bias) = design.fit(y, hp);
    Ok(LogRegModel {
        feature_names: (0..design.dim).map(|i| format!("x{i}")).collect(),
        weights,
        bias,
        hyperparams: hp.clone(),
        vocab_ref: None,
    })
}

/// Trains on sparse rows whose ids are below `dim`.
pub fn train_sparse(x: &[SparseVector], dim: usize, y: &[bool], hp: &Hyperparams) -> Result<LogRegModel, ModelError> {
    check_labels(x.len(), y)?;
    let design = Design::sparse(x, dim)?;
    let (weights, bias) = design.fit(y, hp);
    Ok(LogRegModel {
        feature_names: (0..dim).map(|i| format!("b{i}")).collect(),
        weights,
        bias,
        hyperparams: hp.clone(),
        vocab_ref: None,
    })
}

impl LogRegModel {
    pub fn with_feature_names(mut self, names: Vec<String>) -> Self {
        debug_assert_eq!(names.len(), self.weights.len());
        self.feature_names = names;
        self
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64, ModelError> {
        if x.len() != self.weights.len() {
            return Err(ModelError::DimensionMismatch { expected: self.weights.len(), got: x.len() });
        }
        let z: f64 = self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias;
        Ok(sigmoid(z))
    }

    /// Ids at or beyond the model dimension are ignored.
    pub fn predict_proba_sparse(&self, x: &SparseVector) -> f64 {
        let z: f64 = x
            .iter()
            .filter_map(|(j, v)| self.weights.get(*j).map(|w| w * v))
            .sum::<f64>()
            + self.bias;
        sigmoid(z)
    }

    pub fn predict(&self, x: &[f64]) -> Result<bool, ModelError> {
        Ok(self.predict_proba(x)? >= self.hyperparams.threshold)
    }

    pub fn predict_sparse(&self, x: &SparseVector) -> bool {
        self.predict_proba_sparse(x) >= self.hyperparams.threshold
    }
}

pub fn predict_proba(model: &LogRegModel, x: &[f64]) -> Result<f64, ModelError> {
    model.predict_proba(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: Confusion,
    pub threshold: f64,
}

/// Precision, recall and F1 of the positive (addressee follows up) class.
/// Undefined ratios are reported as 0.
pub fn evaluate(preds: &[bool], gold: &[bool]) -> Result<EvalReport, ModelError> {
    if preds.len() != gold.len() {
        return Err(ModelError::LengthMismatch { preds: preds.len(), gold: gold.len() });
    }
    if preds.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    let mut c = Confusion::default();
    for (&p, &g) in preds.iter().zip(gold) {
        match (p, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    Ok(EvalReport { precision, recall, f1, confusion: c, threshold: DEFAULT_THRESHOLD })
}

/// Seeded Bernoulli draws at the training set's positive rate.
pub fn random_baseline(train_labels: &[bool], n_test: usize, seed: u64) -> Result<Vec<bool>, ModelError> {
    if train_labels.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    let p = train_labels.iter().filter(|y| **y).count() as f64 / train_labels.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n_test).map(|_| rng.gen_bool(p)).collect())
}
