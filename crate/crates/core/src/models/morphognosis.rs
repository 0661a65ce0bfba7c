//! Dual-network sliding-window learner.
//!
//! The current network sees only the present room's marks; the sequence
//! network sees a window holding every room so far. Both learn
//! from the same steps. At prediction time the network with the larger
//! peak activation answers, the current network winning ties.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Network, Prediction};
use crate::config::MlpConfig;
use crate::encoder::{argmax, build_window_aligned, check_width, EncodingDims, WindowAlignment};
use crate::error::{Error, Result};
use crate::maze::Sequence;
use crate::neural::{Mlp, Sample, TrainReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphognosisModel {
    pub dims: EncodingDims,
    #[serde(default)]
    pub alignment: WindowAlignment,
    pub sequence_net: Mlp,
    pub current_net: Mlp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphognosisReport {
    pub current: TrainReport,
    pub sequence: TrainReport,
}

impl MorphognosisModel {
    pub fn new<R: Rng + ?Sized>(
        dims: EncodingDims,
        config: &MlpConfig,
        alignment: WindowAlignment,
        rng: &mut R,
    ) -> Self {
        let current_net = Mlp::new(dims.input_width(), dims.output_width(), config, rng);
        let sequence_net = Mlp::new(dims.window_width(), dims.output_width(), config, rng);
        Self {
            dims,
            alignment,
            sequence_net,
            current_net,
        }
    }

    /// The (current input, target) and (window, target) pairs of every step.
    pub fn training_samples(&self, train: &[Sequence]) -> Result<(Vec<Sample>, Vec<Sample>)> {
        let mut current = Vec::new();
        let mut windows = Vec::new();
        for seq in train {
            let inputs = seq.inputs();
            for (t, step) in seq.steps.iter().enumerate() {
                current.push((step.input.clone(), step.target.clone()));
                windows.push((build_window_aligned(&inputs, t, &self.dims, self.alignment)?, step.target.clone()));
            }
        }
        Ok((current, windows))
    }

    pub fn train<R: Rng + ?Sized>(&mut self, train: &[Sequence], rng: &mut R) -> Result<MorphognosisReport> {
        if train.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let (current, windows) = self.training_samples(train)?;
        let current = self.current_net.train(&current, rng)?;
        let sequence = self.sequence_net.train(&windows, rng)?;
        Ok(MorphognosisReport { current, sequence })
    }

    pub fn predict(&self, inputs: &[Vec<f64>], t: usize) -> Result<Prediction> {
        let window = build_window_aligned(inputs, t, &self.dims, self.alignment)?;
        check_width(self.dims.input_width(), inputs[t].len())?;
        let current = self.current_net.forward(&inputs[t])?;
        let sequence = self.sequence_net.forward(&window)?;
        Ok(arbitrate(current, sequence))
    }

    pub fn predict_sequence(&self, inputs: &[Vec<f64>]) -> Result<Vec<usize>> {
        (0..inputs.len())
            .map(|t| self.predict(inputs, t).map(|p| p.chosen))
            .collect()
    }
}

/// Greatest single activation wins; ties go to the current network.
pub fn arbitrate(current: Vec<f64>, sequence: Vec<f64>) -> Prediction {
    let peak = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (winner, chosen) = if peak(&sequence) > peak(&current) {
        (Network::Sequence, argmax(&sequence))
    } else {
        (Network::Current, argmax(&current))
    };
    Prediction {
        chosen,
        winner,
        responses: vec![(Network::Current, current), (Network::Sequence, sequence)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TaskConfig;
    use crate::maze::{generate_dataset, SequenceKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn arbitration_rules() {
        let p = arbitrate(vec![0.1, 0.9, 0.2], vec![0.7, 0.1, 0.3]);
        assert_eq!((p.winner, p.chosen), (Network::Current, 1));
        let p = arbitrate(vec![0.1, 0.4, 0.2], vec![0.2, 0.1, 0.8]);
        assert_eq!((p.winner, p.chosen), (Network::Sequence, 2));
        let p = arbitrate(vec![0.7, 0.1], vec![0.1, 0.7]);
        assert_eq!((p.winner, p.chosen), (Network::Current, 0));
    }

    fn small_config(nc: usize, ni: usize, epochs: usize) -> TaskConfig {
        TaskConfig {
            num_doors: 3,
            maze_length: 2,
            num_context_mazes: nc,
            num_independent_mazes: ni,
            rng_seed: 13,
            mlp: MlpConfig {
                hidden: 20,
                epochs,
                ..MlpConfig::default()
            },
            ..TaskConfig::default()
        }
    }

    #[test]
    fn sample_coverage_is_identical() {
        let config = small_config(2, 2, 1);
        let ds = generate_dataset(&config).unwrap();
        let model = MorphognosisModel::new(ds.dims, &config.mlp, config.window_alignment, &mut ChaCha8Rng::seed_from_u64(0));
        let (current, windows) = model.training_samples(&ds.train).unwrap();
        let steps: usize = ds.train.iter().map(|s| s.len()).sum();
        assert_eq!(current.len(), steps);
        assert_eq!(windows.len(), steps);
        for (c, w) in current.iter().zip(&windows) {
            assert_eq!(c.1, w.1);
            assert_eq!(c.0.len(), ds.dims.input_width());
            assert_eq!(w.0.len(), ds.dims.window_width());
        }
    }

    #[test]
    fn empty_train_set_is_an_error() {
        let config = small_config(0, 0, 1);
        let dims = EncodingDims::from_config(&config);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut model = MorphognosisModel::new(dims, &config.mlp, config.window_alignment, &mut rng);
        assert!(matches!(model.train(&[], &mut rng), Err(Error::EmptyTrainingSet)));
    }

    #[test]
    fn door_associations_split_between_networks() {
        // Begin marks name the door; the all-ones end marks do not, so only
        // the sequence network can answer the end room.
        let config = small_config(0, 0, 2000);
        let ds = generate_dataset(&config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut model = MorphognosisModel::new(ds.dims, &config.mlp, config.window_alignment, &mut rng);
        model.train(&ds.train, &mut rng).unwrap();
        for seq in &ds.train {
            assert_eq!(seq.kind, SequenceKind::DoorAssociation);
            let inputs = seq.inputs();
            let begin = model.current_net.forward(&inputs[0]).unwrap();
            assert_eq!(argmax(&begin), seq.steps[0].target_index());
            let end = model.predict(&inputs, 1).unwrap();
            assert_eq!(end.winner, Network::Sequence);
            assert_eq!(model.predict_sequence(&inputs).unwrap(), seq.target_indices());
        }
    }

    #[test]
    fn prediction_is_causal() {
        let config = small_config(2, 2, 50);
        let ds = generate_dataset(&config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut model = MorphognosisModel::new(ds.dims, &config.mlp, config.window_alignment, &mut rng);
        model.train(&ds.train, &mut rng).unwrap();
        let a = ds.test[0].inputs();
        let mut b = a.clone();
        let last = b.len() - 1;
        b[last] = ds.test[1].steps[last].input.clone();
        b[last][0] = 1.0 - b[last][0];
        for t in 0..last {
            assert_eq!(model.predict(&a, t).unwrap(), model.predict(&b, t).unwrap());
        }
    }

    #[test]
    fn window_overflow_is_reported() {
        let config = small_config(1, 1, 1);
        let dims = EncodingDims::from_config(&config);
        let model = MorphognosisModel::new(dims, &config.mlp, config.window_alignment, &mut ChaCha8Rng::seed_from_u64(0));
        let long = vec![vec![0.0; dims.input_width()]; dims.window_steps() + 1];
        assert!(matches!(model.predict(&long, 0), Err(Error::WindowOverflow { .. })));
    }
}
