//! Central-difference verification of analytic gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Lstm, Mlp, Sample, SequenceSample};
use crate::config::{LstmConfig, MlpConfig};
use crate::error::{Error, Result};

pub trait Differentiable: Clone {
    type Batch: ?Sized;

    fn batch_loss(&self, batch: &Self::Batch) -> f64;

    /// Mean loss over the batch and its gradient, one vector per tensor.
    fn batch_gradient(&self, batch: &Self::Batch) -> (f64, Vec<Vec<f64>>);

    fn parameters_mut(&mut self) -> Vec<&mut Vec<f64>>;
}

impl Differentiable for Mlp {
    type Batch = [Sample];

    fn batch_loss(&self, batch: &[Sample]) -> f64 {
        self.mean_loss(batch)
    }

    fn batch_gradient(&self, batch: &[Sample]) -> (f64, Vec<Vec<f64>>) {
        let mut grads = self.zero_gradients();
        let mut loss = 0.0;
        for sample in batch {
            loss += self.sample_gradient(sample, &mut grads);
        }
        let n = batch.len() as f64;
        grads.iter_mut().flatten().for_each(|g| *g /= n);
        (loss / n, grads)
    }

    fn parameters_mut(&mut self) -> Vec<&mut Vec<f64>> {
        self.tensors_mut()
    }
}

impl Differentiable for Lstm {
    type Batch = [SequenceSample];

    fn batch_loss(&self, batch: &[SequenceSample]) -> f64 {
        self.mean_loss(batch)
    }

    fn batch_gradient(&self, batch: &[SequenceSample]) -> (f64, Vec<Vec<f64>>) {
        let mut grads = self.zero_gradients();
        let scale = 1.0 / batch.len() as f64;
        let loss: f64 = batch
            .iter()
            .map(|s| self.sequence_gradient(s, scale, &mut grads))
            .sum();
        (loss * scale, grads)
    }

    fn parameters_mut(&mut self) -> Vec<&mut Vec<f64>> {
        self.tensors_mut()
    }
}

/// Largest relative error between the analytic gradient and
/// `(L(θ+ε) - L(θ-ε)) / 2ε`, using `max(|a|, |n|, 1e-8)` as denominator.
pub fn gradient_check<M: Differentiable>(model: &M, batch: &M::Batch, epsilon: f64) -> Result<f64> {
    let (loss, analytic) = model.batch_gradient(batch);
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss);
    }
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (ti, tensor) in analytic.iter().enumerate() {
        for (k, a) in tensor.iter().enumerate() {
            let original = probe.parameters_mut()[ti][k];
            probe.parameters_mut()[ti][k] = original + epsilon;
            let plus = probe.batch_loss(batch);
            probe.parameters_mut()[ti][k] = original - epsilon;
            let minus = probe.batch_loss(batch);
            probe.parameters_mut()[ti][k] = original;
            if !plus.is_finite() || !minus.is_finite() {
                return Err(Error::NonFiniteLoss);
            }
            let numeric = (plus - minus) / (2.0 * epsilon);
            let denom = a.abs().max(numeric.abs()).max(1e-8);
            worst = worst.max((a - numeric).abs() / denom);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradCheckKind {
    Mlp,
    Lstm,
}

/// Builds a small randomly parameterized model of the given kind with a
/// random batch and checks its gradient.
pub fn tiny_gradient_check(kind: GradCheckKind, seed: u64, epsilon: f64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    match kind {
        GradCheckKind::Mlp => {
            let (inputs, hidden, outputs) = (6, 5, 4);
            let config = MlpConfig {
                hidden,
                ..MlpConfig::default()
            };
            let mut net = Mlp::zeros(inputs, outputs, &config);
            for t in net.tensors_mut() {
                *t = uniform(t.len());
            }
            let batch: Vec<Sample> = (0..5).map(|_| (uniform(inputs), targets(&mut uniform, outputs))).collect();
            gradient_check(&net, &batch, epsilon)
        }
        GradCheckKind::Lstm => {
            let (inputs, hidden, outputs) = (3, 4, 3);
            let config = LstmConfig {
                hidden,
                ..LstmConfig::default()
            };
            let mut net = Lstm::zeros(inputs, outputs, &config);
            for t in net.tensors_mut() {
                *t = uniform(t.len());
            }
            let batch: Vec<SequenceSample> = [5, 3]
                .iter()
                .map(|&steps| {
                    let xs = (0..steps).map(|_| uniform(inputs)).collect();
                    let ts = (0..steps).map(|_| targets(&mut uniform, outputs)).collect();
                    (xs, ts)
                })
                .collect();
            gradient_check(&net, &batch, epsilon)
        }
    }
}

fn targets(uniform: &mut impl FnMut(usize) -> Vec<f64>, n: usize) -> Vec<f64> {
    uniform(n).into_iter().map(|v| (v + 1.0) / 2.0).collect()
}
