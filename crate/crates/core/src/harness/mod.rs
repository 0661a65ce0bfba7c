//! Scoring, seeded trials and parameter sweeps.

mod output;
mod sweep;

pub use output::{write_sweep_outputs, SweepFiles, SUMMARY_HEADER, TRIALS_HEADER};
pub use sweep::{run_sweep, CellSummary, Feature, SweepResult, SweepSpec, TrialRecord};

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::TaskConfig;
use crate::error::{Error, Result};
use crate::maze::{generate_dataset, Dataset, Sequence};
use crate::models::{Model, ModelKind};

/// Human-readable form of the seed derivation, recorded in sweep metadata.
pub const SEED_RULE: &str =
    "trial_seed = splitmix64(splitmix64(splitmix64(base_seed) ^ feature_value) ^ trial); \
     model_seed = splitmix64(trial_seed ^ model_stream)";

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_seed(base: u64, feature_value: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ feature_value as u64) ^ trial as u64)
}

pub fn model_seed(trial_seed: u64, kind: ModelKind) -> u64 {
    splitmix64(trial_seed ^ kind.stream())
}

/// Fraction of sequences whose every step was chosen correctly; `None` for
/// an empty set.
pub fn score(predictions: &[Vec<usize>], sequences: &[Sequence]) -> Result<Option<f64>> {
    if predictions.len() != sequences.len() {
        return Err(Error::LengthMismatch {
            predictions: predictions.len(),
            sequences: sequences.len(),
        });
    }
    if sequences.is_empty() {
        return Ok(None);
    }
    let mut solved = 0usize;
    for (pred, seq) in predictions.iter().zip(sequences) {
        if pred.len() != seq.len() {
            return Err(Error::Malformed(format!(
                "{} predictions for a {}-step sequence",
                pred.len(),
                seq.len()
            )));
        }
        if pred.iter().zip(&seq.steps).all(|(p, s)| *p == s.target_index()) {
            solved += 1;
        }
    }
    Ok(Some(solved as f64 / sequences.len() as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub model: ModelKind,
    pub train_acc: f64,
    /// `None` when the test set is empty.
    pub test_acc: Option<f64>,
    pub train_seqs: usize,
    pub test_seqs: usize,
    pub seconds: f64,
}

/// Trains `kind` on a dataset and scores it on both splits.
pub fn evaluate_model(dataset: &Dataset, kind: ModelKind) -> Result<(Model, TrialOutcome)> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(model_seed(dataset.config.rng_seed, kind));
    let mut model = Model::new(kind, &dataset.config, &mut rng);
    model.fit(dataset, &mut rng)?;
    let train_acc = score(&model.predict_all(&dataset.train)?, &dataset.train)?
        .ok_or(Error::EmptyTrainingSet)?;
    let test_acc = score(&model.predict_all(&dataset.test)?, &dataset.test)?;
    let outcome = TrialOutcome {
        model: kind,
        train_acc,
        test_acc,
        train_seqs: dataset.train.len(),
        test_seqs: dataset.test.len(),
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((model, outcome))
}

/// Generates the dataset for `config` and runs every requested model on it,
/// each from its own seed stream.
pub fn run_trial(config: &TaskConfig, models: &[ModelKind]) -> Result<Vec<TrialOutcome>> {
    let dataset = generate_dataset(config)?;
    models
        .iter()
        .map(|kind| evaluate_model(&dataset, *kind).map(|(_, outcome)| outcome))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset() -> Dataset {
        generate_dataset(&TaskConfig {
            num_doors: 3,
            maze_length: 2,
            num_context_mazes: 2,
            num_independent_mazes: 2,
            ..TaskConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn perfect_and_one_wrong() {
        let ds = generate_dataset(&TaskConfig::default()).unwrap();
        let mut preds: Vec<Vec<usize>> = ds.test.iter().map(Sequence::target_indices).collect();
        assert_eq!(score(&preds, &ds.test).unwrap(), Some(1.0));
        assert_eq!(ds.test.len(), 50);
        let last = preds[7].len() - 1;
        preds[7][last] = (preds[7][last] + 1) % 5;
        assert_eq!(score(&preds, &ds.test).unwrap(), Some(49.0 / 50.0));
    }

    #[test]
    fn empty_and_mismatched() {
        assert_eq!(score(&[], &[]).unwrap(), None);
        let ds = dataset();
        assert!(matches!(score(&[], &ds.test), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn oracle_trial_is_perfect_and_repeatable() {
        let config = TaskConfig::default();
        let a = run_trial(&config, &[ModelKind::Oracle]).unwrap();
        assert_eq!((a[0].train_acc, a[0].test_acc), (1.0, Some(1.0)));
        let b = run_trial(&config, &[ModelKind::Oracle]).unwrap();
        assert_eq!((a[0].train_acc, a[0].test_acc), (b[0].train_acc, b[0].test_acc));
    }

    #[test]
    fn no_independent_mazes_reports_na() {
        let config = TaskConfig {
            num_independent_mazes: 0,
            ..TaskConfig::default()
        };
        let out = run_trial(&config, &[ModelKind::Oracle]).unwrap();
        assert_eq!(out[0].test_acc, None);
        assert_eq!(out[0].test_seqs, 0);
    }

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the reference splitmix64 generator seeded with 0
        // are mix(0x9e3779b97f4a7c15 * k) for k = 1, 2.
        assert_eq!(splitmix64(0), 0xe220_a839_7b1d_cdaf);
        assert_eq!(splitmix64(0x9e37_79b9_7f4a_7c15), 0x6e78_9e6a_a1b9_65f4);
    }
}
