//! Logistic-regression training, prediction, and (de)serialization.
//!
//! Both learned stages of the pipeline — the snippet filter and the answer
//! ranker — are small logistic models trained by full-batch gradient descent
//! on an L2-regularized mean log loss. Features are min-max normalized with
//! ranges fitted on the training set and stored in the model file, so a
//! loaded model reproduces training-time predictions exactly.
//!
//! Training is deliberately deterministic: parameters start at zero, the
//! batch order never matters (full-batch), and the only randomness in the
//! whole stage lives in [`resample_balanced`], which is driven by an explicit
//! seed.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CLASSIFIER_NAME: &str = "logistic";

/// Gradient-descent settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Coefficient of the `l2/2 * ||w||^2` penalty; the bias is unpenalized.
    pub l2: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            learning_rate: default_learning_rate(),
            epochs: default_epochs(),
            l2: default_l2(),
        }
    }
}

pub(crate) fn default_learning_rate() -> f64 {
    0.1
}

pub(crate) fn default_epochs() -> usize {
    500
}

pub(crate) fn default_l2() -> f64 {
    1e-4
}

/// One training example. `provenance` describes where the example came from
/// (e.g. which question and snippet produced it) and is quoted by validation
/// errors so bad feature rows can be traced back to their source.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledExample {
    pub features: Vec<f64>,
    pub label: bool,
    pub provenance: String,
}

/// A trained logistic model plus everything needed to reproduce its
/// predictions: feature names, weights, bias, per-feature normalization
/// ranges, the seed that drove example resampling, and the hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub classifier: String,
    pub feature_names: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Per-feature `(min, max)` fitted on the training set.
    pub normalization: Vec<(f64, f64)>,
    pub seed: u64,
    pub hyperparams: Hyperparams,
}

impl LogisticModel {
    /// Probability of the positive class for a raw (unnormalized) feature
    /// vector.
    pub fn predict_proba(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.weights.len() {
            return Err(Error::ArityMismatch {
                expected: self.weights.len(),
                got: features.len(),
            });
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature {
                provenance: "prediction input".into(),
            });
        }
        let x = normalize(features, &self.normalization);
        let z: f64 = self.weights.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>() + self.bias;
        Ok(sigmoid(z))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut body = serde_json::to_string_pretty(self).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })?;
        body.push('\n');
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: LogisticModel = serde_json::from_str(&body).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })?;
        if model.classifier != CLASSIFIER_NAME {
            return Err(Error::UnsupportedClassifier(model.classifier));
        }
        Ok(model)
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// `ln(1 + e^z)` without overflow for large `z`.
fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Min-max scaling of one raw vector; a constant feature maps to 0. The
/// mapping is not clamped, so out-of-range inputs extrapolate.
fn normalize(features: &[f64], ranges: &[(f64, f64)]) -> Vec<f64> {
    features
        .iter()
        .zip(ranges)
        .map(|(&v, &(min, max))| {
            if max > min {
                (v - min) / (max - min)
            } else {
                0.0
            }
        })
        .collect()
}

fn fit_normalization(rows: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let dims = rows.first().map_or(0, Vec::len);
    (0..dims)
        .map(|j| {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for row in rows {
                min = min.min(row[j]);
                max = max.max(row[j]);
            }
            (min, max)
        })
        .collect()
}

/// L2-regularized mean log loss over already-normalized feature rows.
pub fn log_loss(weights: &[f64], bias: f64, l2: f64, rows: &[Vec<f64>], labels: &[bool]) -> f64 {
    debug_assert_eq!(rows.len(), labels.len());
    let mut total = 0.0;
    for (row, &label) in rows.iter().zip(labels) {
        let z: f64 = weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + bias;
        let y = if label { 1.0 } else { 0.0 };
        total += log1p_exp(z) - y * z;
    }
    let penalty: f64 = weights.iter().map(|w| w * w).sum::<f64>() * l2 / 2.0;
    total / rows.len() as f64 + penalty
}

/// Gradient of [`log_loss`] with respect to the weights and bias.
pub fn log_loss_gradient(
    weights: &[f64],
    bias: f64,
    l2: f64,
    rows: &[Vec<f64>],
    labels: &[bool],
) -> (Vec<f64>, f64) {
    debug_assert_eq!(rows.len(), labels.len());
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (row, &label) in rows.iter().zip(labels) {
        let z: f64 = weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + bias;
        let residual = sigmoid(z) - if label { 1.0 } else { 0.0 };
        for (g, v) in grad_w.iter_mut().zip(row) {
            *g += residual * v;
        }
        grad_b += residual;
    }
    let n = rows.len() as f64;
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    (grad_w, grad_b / n)
}

fn validate_examples(feature_names: &[String], examples: &[LabeledExample]) -> Result<()> {
    if examples.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot train on an empty example set".into(),
        ));
    }
    for example in examples {
        if example.features.len() != feature_names.len() {
            return Err(Error::ArityMismatch {
                expected: feature_names.len(),
                got: example.features.len(),
            });
        }
        if example.features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature {
                provenance: example.provenance.clone(),
            });
        }
    }
    Ok(())
}

/// Duplicate minority-class examples (sampled with replacement, seeded) until
/// both classes are the same size. Input order is preserved; duplicates are
/// appended. A balanced input comes back unchanged; a single-class input is
/// an error naming the missing class.
pub fn resample_balanced(examples: &[LabeledExample], seed: u64) -> Result<Vec<LabeledExample>> {
    let positives: Vec<usize> = examples
        .iter()
        .enumerate()
        .filter(|(_, e)| e.label)
        .map(|(i, _)| i)
        .collect();
    let negatives: Vec<usize> = examples
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.label)
        .map(|(i, _)| i)
        .collect();
    if positives.is_empty() {
        return Err(Error::SingleClass {
            missing: "positive",
        });
    }
    if negatives.is_empty() {
        return Err(Error::SingleClass {
            missing: "negative",
        });
    }

    let mut out = examples.to_vec();
    let (minority, deficit) = if positives.len() < negatives.len() {
        (&positives, negatives.len() - positives.len())
    } else {
        (&negatives, positives.len() - negatives.len())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..deficit {
        let pick = minority[rng.gen_range(0..minority.len())];
        out.push(examples[pick].clone());
    }
    Ok(out)
}

/// Train a logistic model by full-batch gradient descent from zero-initialized
/// parameters. `seed` is recorded in the model file for provenance (it is the
/// seed that drove any example resampling); training itself is deterministic.
pub fn train_logistic(
    feature_names: &[String],
    examples: &[LabeledExample],
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<LogisticModel> {
    train_logistic_with_history(feature_names, examples, hyperparams, seed).map(|(m, _)| m)
}

/// [`train_logistic`], additionally returning the loss before training and
/// after each epoch (`epochs + 1` entries).
pub fn train_logistic_with_history(
    feature_names: &[String],
    examples: &[LabeledExample],
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<(LogisticModel, Vec<f64>)> {
    validate_examples(feature_names, examples)?;
    if !(hyperparams.learning_rate > 0.0 && hyperparams.learning_rate.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "learning_rate must be positive and finite, got {}",
            hyperparams.learning_rate
        )));
    }
    if !(hyperparams.l2 >= 0.0 && hyperparams.l2.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "l2 must be non-negative and finite, got {}",
            hyperparams.l2
        )));
    }

    let raw: Vec<Vec<f64>> = examples.iter().map(|e| e.features.clone()).collect();
    let normalization = fit_normalization(&raw);
    let rows: Vec<Vec<f64>> = raw.iter().map(|r| normalize(r, &normalization)).collect();
    let labels: Vec<bool> = examples.iter().map(|e| e.label).collect();

    let dims = feature_names.len();
    let mut weights = vec![0.0; dims];
    let mut bias = 0.0;
    let mut history = Vec::with_capacity(hyperparams.epochs + 1);
    history.push(log_loss(&weights, bias, hyperparams.l2, &rows, &labels));
    for _ in 0..hyperparams.epochs {
        let (grad_w, grad_b) = log_loss_gradient(&weights, bias, hyperparams.l2, &rows, &labels);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= hyperparams.learning_rate * g;
        }
        bias -= hyperparams.learning_rate * grad_b;
        history.push(log_loss(&weights, bias, hyperparams.l2, &rows, &labels));
    }

    let model = LogisticModel {
        classifier: CLASSIFIER_NAME.into(),
        feature_names: feature_names.to_vec(),
        weights,
        bias,
        normalization,
        seed,
        hyperparams: hyperparams.clone(),
    };
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("f{i}")).collect()
    }

    fn example(features: &[f64], label: bool) -> LabeledExample {
        LabeledExample {
            features: features.to_vec(),
            label,
            provenance: format!("test example {features:?}"),
        }
    }

    #[test]
    fn constant_feature_keeps_exactly_zero_weight() {
        // Feature 0 is constant (min == max, normalizes to 0 everywhere), so
        // zero-init full-batch descent can never move its weight. Feature 1
        // separates the classes and must train away from zero.
        let examples = vec![
            example(&[7.5, 0.0], false),
            example(&[7.5, 1.0], false),
            example(&[7.5, 4.0], true),
            example(&[7.5, 5.0], true),
        ];
        let model = train_logistic(&names(2), &examples, &Hyperparams::default(), 0).unwrap();
        assert_eq!(model.weights[0], 0.0);
        assert!(
            model.weights[1] > 0.5,
            "separating weight stayed near zero: {model:?}"
        );
        assert_eq!(model.normalization[0], (7.5, 7.5));
        assert_eq!(model.normalization[1], (0.0, 5.0));
    }

    #[test]
    fn separable_data_trains_a_confident_direction() {
        let examples = vec![
            example(&[0.0], false),
            example(&[0.5], false),
            example(&[1.0], false),
            example(&[2.0], true),
            example(&[2.5], true),
            example(&[3.0], true),
        ];
        let model = train_logistic(&names(1), &examples, &Hyperparams::default(), 0).unwrap();
        assert!(model.weights[0] > 0.0);
        let low = model.predict_proba(&[0.2]).unwrap();
        let high = model.predict_proba(&[2.8]).unwrap();
        assert!(low < 0.2, "low-side probability too high: {low}");
        assert!(high > 0.8, "high-side probability too low: {high}");
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        // Checks the analytic gradient against (L(θ+h) - L(θ-h)) / 2h at many
        // random points, over both regularized and unregularized losses.
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_317);
        let mut points_checked = 0;
        for _ in 0..30 {
            let dims = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=8);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..dims).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            for &l2 in &[0.0, 1e-4, 0.1] {
                let weights: Vec<f64> = (0..dims).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let bias = rng.gen_range(-1.0..1.0);
                let (grad_w, grad_b) = log_loss_gradient(&weights, bias, l2, &rows, &labels);

                let check = |analytic: f64, numeric: f64| {
                    let scale = analytic.abs().max(numeric.abs()).max(1e-8);
                    assert!(
                        (analytic - numeric).abs() / scale < 1e-5,
                        "gradient mismatch: analytic {analytic} vs numeric {numeric}"
                    );
                };
                for j in 0..dims {
                    let h = 6e-6 * weights[j].abs().max(1.0);
                    let mut plus = weights.clone();
                    plus[j] += h;
                    let mut minus = weights.clone();
                    minus[j] -= h;
                    let numeric = (log_loss(&plus, bias, l2, &rows, &labels)
                        - log_loss(&minus, bias, l2, &rows, &labels))
                        / (2.0 * h);
                    check(grad_w[j], numeric);
                    points_checked += 1;
                }
                let h = 6e-6 * bias.abs().max(1.0);
                let numeric = (log_loss(&weights, bias + h, l2, &rows, &labels)
                    - log_loss(&weights, bias - h, l2, &rows, &labels))
                    / (2.0 * h);
                check(grad_b, numeric);
                points_checked += 1;
            }
        }
        assert!(
            points_checked >= 100,
            "only {points_checked} gradient points checked"
        );
    }

    #[test]
    fn loss_history_is_non_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let examples: Vec<LabeledExample> = (0..40)
            .map(|_| {
                let label = rng.gen_bool(0.5);
                let center = if label { 1.5 } else { 0.0 };
                let features = vec![
                    center + rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.0..4.0),
                    center + rng.gen_range(-2.0..2.0),
                ];
                example(&features, label)
            })
            .collect();
        let (_, history) =
            train_logistic_with_history(&names(3), &examples, &Hyperparams::default(), 0).unwrap();
        assert_eq!(history.len(), Hyperparams::default().epochs + 1);
        for pair in history.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-12,
                "loss increased from {} to {}",
                pair[0],
                pair[1]
            );
        }
    }

    #[test]
    fn untrained_model_is_indifferent() {
        // Zero epochs leaves the zero-initialized parameters untouched, so
        // every input scores exactly 0.5.
        let examples = vec![example(&[0.0, 3.0], false), example(&[1.0, 9.0], true)];
        let hp = Hyperparams {
            epochs: 0,
            ..Hyperparams::default()
        };
        let model = train_logistic(&names(2), &examples, &hp, 0).unwrap();
        assert_eq!(model.predict_proba(&[0.7, 5.0]).unwrap(), 0.5);
        assert_eq!(model.predict_proba(&[123.0, -9.0]).unwrap(), 0.5);
    }

    #[test]
    fn label_flip_mirrors_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let examples: Vec<LabeledExample> = (0..20)
            .map(|_| {
                let label = rng.gen_bool(0.4);
                let features = vec![rng.gen_range(-3.0..3.0), rng.gen_range(0.0..1.0)];
                example(&features, label)
            })
            .collect();
        let flipped: Vec<LabeledExample> = examples
            .iter()
            .map(|e| LabeledExample {
                label: !e.label,
                ..e.clone()
            })
            .collect();
        let hp = Hyperparams::default();
        let model = train_logistic(&names(2), &examples, &hp, 0).unwrap();
        let mirror = train_logistic(&names(2), &flipped, &hp, 0).unwrap();
        for probe in [[0.0, 0.5], [-2.0, 0.1], [2.5, 0.9]] {
            let p = model.predict_proba(&probe).unwrap();
            let q = mirror.predict_proba(&probe).unwrap();
            assert!((p + q - 1.0).abs() < 1e-6, "p = {p}, mirrored p = {q}");
        }
    }

    #[test]
    fn duplicated_dataset_trains_the_same_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let examples: Vec<LabeledExample> = (0..15)
            .map(|_| {
                let label = rng.gen_bool(0.5);
                example(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)], label)
            })
            .collect();
        let doubled: Vec<LabeledExample> =
            examples.iter().chain(examples.iter()).cloned().collect();
        let hp = Hyperparams::default();
        let single = train_logistic(&names(2), &examples, &hp, 0).unwrap();
        let double = train_logistic(&names(2), &doubled, &hp, 0).unwrap();
        for (a, b) in single.weights.iter().zip(&double.weights) {
            assert!((a - b).abs() < 1e-9, "weights diverged: {a} vs {b}");
        }
        assert!((single.bias - double.bias).abs() < 1e-9);
    }

    #[test]
    fn training_rejects_bad_inputs() {
        let hp = Hyperparams::default();
        assert!(matches!(
            train_logistic(&names(1), &[], &hp, 0),
            Err(Error::InvalidArgument(_))
        ));

        let ragged = vec![example(&[1.0, 2.0], true), example(&[1.0], false)];
        assert!(matches!(
            train_logistic(&names(2), &ragged, &hp, 0),
            Err(Error::ArityMismatch {
                expected: 2,
                got: 1
            })
        ));

        let mut bad = example(&[1.0], true);
        bad.provenance = "snippet 3 of question \"X born\"".into();
        let poisoned = vec![example(&[0.0], false), bad, example(&[2.0], true)];
        let mut poisoned = poisoned;
        poisoned[1].features[0] = f64::NAN;
        match train_logistic(&names(1), &poisoned, &hp, 0) {
            Err(Error::NonFiniteFeature { provenance }) => {
                assert!(provenance.contains("snippet 3"));
            }
            other => panic!("expected non-finite error, got {other:?}"),
        }

        let ok = vec![example(&[0.0], false), example(&[1.0], true)];
        let bad_lr = Hyperparams {
            learning_rate: 0.0,
            ..hp.clone()
        };
        assert!(matches!(
            train_logistic(&names(1), &ok, &bad_lr, 0),
            Err(Error::InvalidArgument(_))
        ));
        let bad_l2 = Hyperparams { l2: -1.0, ..hp };
        assert!(matches!(
            train_logistic(&names(1), &ok, &bad_l2, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn predict_validates_arity_and_finiteness() {
        let examples = vec![example(&[0.0, 0.0], false), example(&[1.0, 1.0], true)];
        let model = train_logistic(&names(2), &examples, &Hyperparams::default(), 0).unwrap();
        assert!(matches!(
            model.predict_proba(&[1.0]),
            Err(Error::ArityMismatch {
                expected: 2,
                got: 1
            })
        ));
        assert!(matches!(
            model.predict_proba(&[1.0, f64::INFINITY]),
            Err(Error::NonFiniteFeature { .. })
        ));
    }

    #[test]
    fn resample_keeps_balanced_input_unchanged() {
        let examples: Vec<LabeledExample> =
            (0..10).map(|i| example(&[i as f64], i % 2 == 0)).collect();
        assert_eq!(resample_balanced(&examples, 99).unwrap(), examples);
    }

    #[test]
    fn resample_appends_minority_duplicates_until_balanced() {
        let mut examples: Vec<LabeledExample> =
            (0..3).map(|i| example(&[i as f64], true)).collect();
        examples.extend((0..90).map(|i| example(&[100.0 + i as f64], false)));

        let resampled = resample_balanced(&examples, 7).unwrap();
        assert_eq!(resampled.len(), 180);
        assert_eq!(&resampled[..93], &examples[..]);
        let positives = resampled.iter().filter(|e| e.label).count();
        assert_eq!(positives, 90);
        // Every appended example is a copy of one of the three positives.
        for extra in &resampled[93..] {
            assert!(extra.label);
            assert!(examples[..3].contains(extra));
        }
    }

    #[test]
    fn resample_balances_exactly_at_many_ratios() {
        for (pos, neg) in [(1usize, 5usize), (2, 60), (1, 100), (60, 2)] {
            let mut examples: Vec<LabeledExample> =
                (0..pos).map(|i| example(&[i as f64], true)).collect();
            examples.extend((0..neg).map(|i| example(&[1000.0 + i as f64], false)));
            let resampled = resample_balanced(&examples, 3).unwrap();
            let p = resampled.iter().filter(|e| e.label).count();
            let n = resampled.len() - p;
            assert_eq!(p, n, "unbalanced after resample for {pos}:{neg}");
            assert_eq!(p, pos.max(neg));
        }
    }

    #[test]
    fn resample_is_seed_deterministic() {
        let mut examples: Vec<LabeledExample> =
            (0..4).map(|i| example(&[i as f64], true)).collect();
        examples.extend((0..40).map(|i| example(&[50.0 + i as f64], false)));
        let a = resample_balanced(&examples, 17).unwrap();
        let b = resample_balanced(&examples, 17).unwrap();
        assert_eq!(a, b);
        let c = resample_balanced(&examples, 18).unwrap();
        assert_ne!(a, c, "different seeds should draw different duplicates");
    }

    #[test]
    fn resample_requires_both_classes() {
        let all_true: Vec<LabeledExample> = (0..5).map(|i| example(&[i as f64], true)).collect();
        match resample_balanced(&all_true, 0) {
            Err(Error::SingleClass { missing }) => assert_eq!(missing, "negative"),
            other => panic!("expected single-class error, got {other:?}"),
        }
        let all_false: Vec<LabeledExample> = (0..5).map(|i| example(&[i as f64], false)).collect();
        match resample_balanced(&all_false, 0) {
            Err(Error::SingleClass { missing }) => assert_eq!(missing, "positive"),
            other => panic!("expected single-class error, got {other:?}"),
        }
    }

    #[test]
    fn model_file_round_trips_with_exact_key_set() {
        let examples = vec![
            example(&[0.0, 2.0], false),
            example(&[1.0, 3.0], true),
            example(&[0.5, 2.5], true),
        ];
        let model = train_logistic(&names(2), &examples, &Hyperparams::default(), 42).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ranker.json");
        model.save(&path).unwrap();

        let loaded = LogisticModel::load(&path).unwrap();
        assert_eq!(loaded, model);

        let value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        // serde_json::Value reports object keys in sorted order.
        let keys: Vec<&str> = value
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        assert_eq!(
            keys,
            [
                "bias",
                "classifier",
                "feature_names",
                "hyperparams",
                "normalization",
                "seed",
                "weights"
            ]
        );
        assert_eq!(value["classifier"], "logistic");
        assert_eq!(value["seed"], 42);
        let hp_keys: Vec<&str> = value["hyperparams"]
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        assert_eq!(hp_keys, ["epochs", "l2", "learning_rate"]);
        assert_eq!(value["normalization"][0], serde_json::json!([0.0, 1.0]));
    }

    #[test]
    fn loading_a_foreign_classifier_fails() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let body = serde_json::json!({
            "classifier": "decision-tree",
            "feature_names": ["f0"],
            "weights": [1.0],
            "bias": 0.0,
            "normalization": [[0.0, 1.0]],
            "seed": 0,
            "hyperparams": {"learning_rate": 0.1, "epochs": 1, "l2": 0.0},
        });
        std::fs::write(&path, body.to_string()).unwrap();
        match LogisticModel::load(&path) {
            Err(Error::UnsupportedClassifier(name)) => assert_eq!(name, "decision-tree"),
            other => panic!("expected unsupported-classifier error, got {other:?}"),
        }
    }
}
