use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::LstmConfig;
use crate::encoder::{argmax, EncodingDims};
use crate::error::{Error, Result};
use crate::maze::Sequence;
use crate::neural::{Lstm, SequenceSample, TrainReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmModel {
    pub dims: EncodingDims,
    pub net: Lstm,
}

impl LstmModel {
    pub fn new<R: Rng + ?Sized>(dims: EncodingDims, config: &LstmConfig, rng: &mut R) -> Self {
        Self {
            dims,
            net: Lstm::new(dims.input_width(), dims.output_width(), config, rng),
        }
    }

    pub fn train<R: Rng + ?Sized>(&mut self, train: &[Sequence], rng: &mut R) -> Result<TrainReport> {
        if train.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let samples: Vec<SequenceSample> = train
            .iter()
            .map(|s| (s.inputs(), s.steps.iter().map(|st| st.target.clone()).collect()))
            .collect();
        self.net.train(&samples, rng)
    }

    pub fn predict(&self, inputs: &[Vec<f64>]) -> Result<Vec<usize>> {
        Ok(self.net.forward(inputs)?.iter().map(|y| argmax(y)).collect())
    }
}
