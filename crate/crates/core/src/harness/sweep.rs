use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_trial, trial_seed, TrialOutcome};
use crate::config::TaskConfig;
use crate::error::{Error, Result};
use crate::models::ModelKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Feature {
    Doors,
    /// Context-attached and independent maze counts, moved together.
    MazeQuantity,
    MazeLength,
}

impl Feature {
    pub fn name(self) -> &'static str {
        match self {
            Feature::Doors => "doors",
            Feature::MazeQuantity => "maze-quantity",
            Feature::MazeLength => "maze-length",
        }
    }

    pub fn default_values(self) -> Vec<usize> {
        match self {
            Feature::Doors => (2..=8).collect(),
            Feature::MazeQuantity => (2..=14).step_by(2).collect(),
            Feature::MazeLength => (1..=8).collect(),
        }
    }

    pub fn apply(self, base: &TaskConfig, value: usize) -> TaskConfig {
        let mut config = base.clone();
        match self {
            Feature::Doors => config.num_doors = value,
            Feature::MazeQuantity => {
                config.num_context_mazes = value;
                config.num_independent_mazes = value;
            }
            Feature::MazeLength => config.maze_length = value,
        }
        config
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Feature::Doors, Feature::MazeQuantity, Feature::MazeLength]
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown sweep feature '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub feature: Feature,
    pub values: Vec<usize>,
    /// Every other parameter. Its `rng_seed` is the sweep's base seed.
    pub base: TaskConfig,
    pub trials: usize,
    pub models: Vec<ModelKind>,
}

impl SweepSpec {
    pub fn new(feature: Feature, base: TaskConfig) -> Self {
        Self {
            feature,
            values: feature.default_values(),
            base,
            trials: 25,
            models: vec![ModelKind::Morphognosis, ModelKind::Lstm],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidConfig("sweep needs at least one value".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("sweep values must be strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidConfig("no models selected".into()));
        }
        for value in &self.values {
            self.feature.apply(&self.base, *value).validate()?;
        }
        Ok(())
    }

    pub fn trial_config(&self, value: usize, trial: usize) -> TaskConfig {
        let mut config = self.feature.apply(&self.base, value);
        config.rng_seed = trial_seed(self.base.rng_seed, value, trial);
        config
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub feature_value: usize,
    pub trial: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub outcome: TrialOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub feature_value: usize,
    pub model: ModelKind,
    pub trials: usize,
    pub train_accs: Vec<f64>,
    pub test_accs: Vec<Option<f64>>,
    pub train_mean: f64,
    pub train_std: f64,
    pub test_mean: Option<f64>,
    pub test_std: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub feature: Feature,
    /// Ordered by feature value, then trial, then model.
    pub records: Vec<TrialRecord>,
    /// Ordered by feature value, then model.
    pub cells: Vec<CellSummary>,
}

impl SweepResult {
    pub fn cell(&self, value: usize, model: ModelKind) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.feature_value == value && c.model == model)
    }
}

/// Runs every (value, trial) pair on up to `jobs` threads. Results are
/// reassembled in key order, so the thread count never changes the output.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    spec.validate()?;
    let keys: Vec<(usize, usize)> = spec
        .values
        .iter()
        .flat_map(|v| (0..spec.trials).map(move |t| (*v, t)))
        .collect();
    let run = |&(value, trial): &(usize, usize)| -> Result<Vec<TrialRecord>> {
        let config = spec.trial_config(value, trial);
        let outcomes = run_trial(&config, &spec.models)?;
        Ok(outcomes
            .into_iter()
            .map(|outcome| TrialRecord {
                feature_value: value,
                trial,
                seed: config.rng_seed,
                outcome,
            })
            .collect())
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let nested: Vec<Vec<TrialRecord>> = pool.install(|| keys.par_iter().map(run).collect::<Result<_>>())?;
    let records: Vec<TrialRecord> = nested.into_iter().flatten().collect();

    let mut cells = Vec::new();
    for value in &spec.values {
        for model in &spec.models {
            let rows: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.feature_value == *value && r.outcome.model == *model)
                .collect();
            cells.push(summarize(*value, *model, &rows));
        }
    }
    Ok(SweepResult {
        feature: spec.feature,
        records,
        cells,
    })
}

fn summarize(feature_value: usize, model: ModelKind, rows: &[&TrialRecord]) -> CellSummary {
    let train_accs: Vec<f64> = rows.iter().map(|r| r.outcome.train_acc).collect();
    let test_accs: Vec<Option<f64>> = rows.iter().map(|r| r.outcome.test_acc).collect();
    let (train_mean, train_std) = mean_std(&train_accs);
    let tests: Option<Vec<f64>> = test_accs.iter().copied().collect();
    let (test_mean, test_std) = match tests {
        Some(t) if !t.is_empty() => {
            let (m, s) = mean_std(&t);
            (Some(m), Some(s))
        }
        _ => (None, None),
    };
    CellSummary {
        feature_value,
        model,
        trials: rows.len(),
        train_accs,
        test_accs,
        train_mean,
        train_std,
        test_mean,
        test_std,
        seconds: rows.iter().map(|r| r.outcome.seconds).sum(),
    }
}

/// Mean and sample standard deviation (zero for a single value).
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn oracle_spec(feature: Feature, values: Vec<usize>, trials: usize) -> SweepSpec {
        SweepSpec {
            values,
            trials,
            models: vec![ModelKind::Oracle],
            ..SweepSpec::new(feature, TaskConfig::default())
        }
    }

    #[test]
    fn features_hold_other_parameters() {
        let base = TaskConfig::default();
        let c = Feature::Doors.apply(&base, 7);
        assert_eq!((c.num_doors, c.maze_length, c.num_context_mazes, c.num_independent_mazes), (7, 5, 10, 10));
        let c = Feature::MazeLength.apply(&base, 2);
        assert_eq!((c.num_doors, c.maze_length, c.num_context_mazes, c.num_independent_mazes), (5, 2, 10, 10));
        let c = Feature::MazeQuantity.apply(&base, 4);
        assert_eq!((c.num_doors, c.maze_length, c.num_context_mazes, c.num_independent_mazes), (5, 5, 4, 4));
    }

    #[test]
    fn validation() {
        assert!(oracle_spec(Feature::Doors, vec![], 1).validate().is_err());
        assert!(oracle_spec(Feature::Doors, vec![3, 3], 1).validate().is_err());
        assert!(oracle_spec(Feature::Doors, vec![4, 3], 1).validate().is_err());
        assert!(oracle_spec(Feature::Doors, vec![3], 0).validate().is_err());
        assert!(oracle_spec(Feature::Doors, vec![1, 2], 1).validate().is_err());
        oracle_spec(Feature::MazeLength, vec![0, 1], 1).validate().unwrap();
    }

    #[test]
    fn seeds_are_distinct_over_default_grids() {
        for feature in [Feature::Doors, Feature::MazeQuantity, Feature::MazeLength] {
            let mut seen = HashSet::new();
            let spec = SweepSpec::new(feature, TaskConfig::default());
            for v in &spec.values {
                for t in 0..spec.trials {
                    let seed = spec.trial_config(*v, t).rng_seed;
                    assert_eq!(seed, trial_seed(4517, *v, t));
                    seen.insert(seed);
                }
            }
            assert_eq!(seen.len(), spec.values.len() * spec.trials);
        }
    }

    #[test]
    fn single_cell_equals_trial() {
        let spec = oracle_spec(Feature::Doors, vec![3], 1);
        let result = run_sweep(&spec, 1).unwrap();
        assert_eq!(result.cells.len(), 1);
        let trial = run_trial(&spec.trial_config(3, 0), &[ModelKind::Oracle]).unwrap();
        assert_eq!(result.cells[0].train_mean, trial[0].train_acc);
        assert_eq!(result.cells[0].test_mean, trial[0].test_acc);
    }

    #[test]
    fn parallelism_does_not_change_results() {
        let spec = oracle_spec(Feature::MazeQuantity, vec![0, 2, 4], 4);
        let a = run_sweep(&spec, 1).unwrap();
        let b = run_sweep(&spec, 4).unwrap();
        let strip = |r: &SweepResult| -> Vec<(usize, usize, u64, f64, Option<f64>)> {
            r.records
                .iter()
                .map(|x| (x.feature_value, x.trial, x.seed, x.outcome.train_acc, x.outcome.test_acc))
                .collect()
        };
        assert_eq!(strip(&a), strip(&b));
        // zero independent mazes: n/a, never 1.0
        assert_eq!(a.cell(0, ModelKind::Oracle).unwrap().test_mean, None);
        assert_eq!(a.cell(2, ModelKind::Oracle).unwrap().test_mean, Some(1.0));
    }

    #[test]
    fn mean_std_basics() {
        assert_eq!(mean_std(&[0.5]), (0.5, 0.0));
        let (m, s) = mean_std(&[0.0, 1.0]);
        assert_eq!(m, 0.5);
        assert!((s - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
