//! Plot-ready CSV files and a metadata document for a finished sweep.
//!
//! The CSVs are a pure function of the sweep unless timing is requested;
//! wall-clock values and the creation time otherwise live only in the
//! metadata JSON.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::{SweepResult, SweepSpec, SEED_RULE};
use crate::error::{Error, Result};

pub const TRIALS_HEADER: [&str; 10] = [
    "sweep",
    "feature_value",
    "model",
    "trial",
    "seed",
    "train_acc",
    "test_acc",
    "train_seqs",
    "test_seqs",
    "seconds",
];

pub const SUMMARY_HEADER: [&str; 9] = [
    "sweep",
    "feature_value",
    "model",
    "trials",
    "train_mean",
    "train_std",
    "test_mean",
    "test_std",
    "seconds",
];

#[derive(Debug, Clone)]
pub struct SweepFiles {
    pub trials: PathBuf,
    pub summary: PathBuf,
    pub metadata: PathBuf,
}

#[derive(Serialize)]
struct Metadata<'a> {
    sweep: &'a SweepSpec,
    seed_rule: &'a str,
    timing_in_csv: bool,
    created_unix_seconds: u64,
    cell_seconds: Vec<(usize, String, f64)>,
}

fn na(value: Option<f64>) -> String {
    value.map_or_else(|| "n/a".to_string(), |v| v.to_string())
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_sweep_outputs(spec: &SweepSpec, result: &SweepResult, dir: &Path, timing: bool) -> Result<SweepFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = result.feature.name();
    let files = SweepFiles {
        trials: dir.join(format!("{stem}_trials.csv")),
        summary: dir.join(format!("{stem}_summary.csv")),
        metadata: dir.join(format!("{stem}_metadata.json")),
    };
    let seconds = |s: f64| if timing { format!("{s:.3}") } else { String::new() };

    let mut w = csv::Writer::from_path(&files.trials).map_err(csv_err(&files.trials))?;
    w.write_record(TRIALS_HEADER).map_err(csv_err(&files.trials))?;
    for r in &result.records {
        w.write_record([
            stem.to_string(),
            r.feature_value.to_string(),
            r.outcome.model.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.outcome.train_acc.to_string(),
            na(r.outcome.test_acc),
            r.outcome.train_seqs.to_string(),
            r.outcome.test_seqs.to_string(),
            seconds(r.outcome.seconds),
        ])
        .map_err(csv_err(&files.trials))?;
    }
    w.flush().map_err(|e| Error::io(&files.trials, e))?;

    let mut w = csv::Writer::from_path(&files.summary).map_err(csv_err(&files.summary))?;
    w.write_record(SUMMARY_HEADER).map_err(csv_err(&files.summary))?;
    for c in &result.cells {
        w.write_record([
            stem.to_string(),
            c.feature_value.to_string(),
            c.model.to_string(),
            c.trials.to_string(),
            c.train_mean.to_string(),
            c.train_std.to_string(),
            na(c.test_mean),
            na(c.test_std),
            seconds(c.seconds),
        ])
        .map_err(csv_err(&files.summary))?;
    }
    w.flush().map_err(|e| Error::io(&files.summary, e))?;

    let metadata = Metadata {
        sweep: spec,
        seed_rule: SEED_RULE,
        timing_in_csv: timing,
        created_unix_seconds: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        cell_seconds: result
            .cells
            .iter()
            .map(|c| (c.feature_value, c.model.to_string(), c.seconds))
            .collect(),
    };
    let text = serde_json::to_string_pretty(&metadata).map_err(|e| Error::json(&files.metadata, e))?;
    fs::write(&files.metadata, text).map_err(|e| Error::io(&files.metadata, e))?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TaskConfig;
    use crate::harness::{run_sweep, Feature};
    use crate::models::ModelKind;

    #[test]
    fn headers_and_rows() {
        let spec = SweepSpec {
            values: vec![0, 1],
            trials: 2,
            models: vec![ModelKind::Oracle],
            ..SweepSpec::new(Feature::MazeQuantity, TaskConfig::default())
        };
        let result = run_sweep(&spec, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = write_sweep_outputs(&spec, &result, dir.path(), false).unwrap();
        let trials = fs::read_to_string(&files.trials).unwrap();
        let mut lines = trials.lines();
        assert_eq!(
            lines.next().unwrap(),
            "sweep,feature_value,model,trial,seed,train_acc,test_acc,train_seqs,test_seqs,seconds"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "maze-quantity");
        assert_eq!(first[6], "n/a");
        assert_eq!(first[9], "");
        assert_eq!(trials.lines().count(), 1 + 4);
        let summary = fs::read_to_string(&files.summary).unwrap();
        assert_eq!(summary.lines().count(), 1 + 2);
        assert!(summary.lines().nth(2).unwrap().starts_with("maze-quantity,1,oracle,2,1,0,1,0,"));
        let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(&files.metadata).unwrap()).unwrap();
        assert_eq!(meta["sweep"]["feature"], "maze-quantity");
        assert!(meta["seed_rule"].as_str().unwrap().contains("splitmix64"));
    }
}
