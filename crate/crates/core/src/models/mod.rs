//! The contestants and the rule-based reference, behind one train/predict
//! contract so the harness can treat them alike.

mod lstm_model;
mod morphognosis;
mod oracle;

pub use lstm_model::LstmModel;
pub use morphognosis::{arbitrate, MorphognosisModel, MorphognosisReport};
pub use oracle::{oracle_predict, OracleModel};

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::TaskConfig;
use crate::encoder::EncodingDims;
use crate::error::{Error, Result};
use crate::maze::{Dataset, Sequence};
use crate::neural::TrainReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Network {
    Sequence,
    Current,
    Lstm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub chosen: usize,
    pub winner: Network,
    pub responses: Vec<(Network, Vec<f64>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Oracle,
    Morphognosis,
    Lstm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Oracle, ModelKind::Morphognosis, ModelKind::Lstm];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Oracle => "oracle",
            ModelKind::Morphognosis => "morphognosis",
            ModelKind::Lstm => "lstm",
        }
    }

    /// Stream tag mixed into per-model seeds.
    pub(crate) fn stream(self) -> u64 {
        match self {
            ModelKind::Oracle => 0x6f72_6163_6c65,
            ModelKind::Morphognosis => 0x6d6f_7270_686f,
            ModelKind::Lstm => 0x6c73_746d,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown model '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Oracle(OracleModel),
    Morphognosis(MorphognosisModel),
    Lstm(LstmModel),
}

impl Model {
    /// Freshly initialized, untrained model.
    pub fn new<R: Rng + ?Sized>(kind: ModelKind, config: &TaskConfig, rng: &mut R) -> Self {
        let dims = EncodingDims::from_config(config);
        match kind {
            ModelKind::Oracle => Model::Oracle(OracleModel::new(dims)),
            ModelKind::Morphognosis => Model::Morphognosis(MorphognosisModel::new(dims, &config.mlp, config.window_alignment, rng)),
            ModelKind::Lstm => Model::Lstm(LstmModel::new(dims, &config.lstm, rng)),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Oracle(_) => ModelKind::Oracle,
            Model::Morphognosis(_) => ModelKind::Morphognosis,
            Model::Lstm(_) => ModelKind::Lstm,
        }
    }

    pub fn dims(&self) -> &EncodingDims {
        match self {
            Model::Oracle(m) => &m.dims,
            Model::Morphognosis(m) => &m.dims,
            Model::Lstm(m) => &m.dims,
        }
    }

    /// Trains on `dataset.train`; returns one report per trained network.
    pub fn fit<R: Rng + ?Sized>(&mut self, dataset: &Dataset, rng: &mut R) -> Result<Vec<TrainReport>> {
        if *self.dims() != dataset.dims {
            return Err(Error::InvalidConfig("model and dataset dimensions differ".into()));
        }
        match self {
            Model::Oracle(m) => {
                m.fit(dataset)?;
                Ok(Vec::new())
            }
            Model::Morphognosis(m) => {
                let r = m.train(&dataset.train, rng)?;
                Ok(vec![r.current, r.sequence])
            }
            Model::Lstm(m) => Ok(vec![m.train(&dataset.train, rng)?]),
        }
    }

    pub fn predict(&self, inputs: &[Vec<f64>]) -> Result<Vec<usize>> {
        match self {
            Model::Oracle(m) => m.predict(inputs),
            Model::Morphognosis(m) => m.predict_sequence(inputs),
            Model::Lstm(m) => m.predict(inputs),
        }
    }

    pub fn predict_all(&self, sequences: &[Sequence]) -> Result<Vec<Vec<usize>>> {
        sequences.iter().map(|s| self.predict(&s.inputs())).collect()
    }
}

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub model: Model,
}

impl Checkpoint {
    pub fn new(model: Model) -> Self {
        Self {
            format_version: CHECKPOINT_VERSION,
            model,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self).map_err(|e| Error::json(path, e))?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ckpt: Checkpoint = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        if ckpt.format_version != CHECKPOINT_VERSION {
            return Err(Error::Malformed(format!(
                "{}: unsupported checkpoint version {}",
                path.display(),
                ckpt.format_version
            )));
        }
        Ok(ckpt)
    }
}
