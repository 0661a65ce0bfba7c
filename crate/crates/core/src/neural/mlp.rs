use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{all_finite, init_uniform, mat_t_vec_acc, mat_vec_acc, outer_acc, sigmoid, TrainReport};
use crate::config::MlpConfig;
use crate::encoder::check_width;
use crate::error::{Error, Result};

/// `(input, target)` pair.
pub type Sample = (Vec<f64>, Vec<f64>);

/// Sigmoid hidden layer, sigmoid outputs, squared-error loss
/// `0.5 * sum (y - t)^2` per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
    /// `hidden x inputs`, row-major.
    pub w_hidden: Vec<f64>,
    pub b_hidden: Vec<f64>,
    /// `outputs x hidden`, row-major.
    pub w_out: Vec<f64>,
    pub b_out: Vec<f64>,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    /// Momentum buffers, present once training has run.
    #[serde(default)]
    velocity: Option<Vec<Vec<f64>>>,
}

struct Activations {
    hidden: Vec<f64>,
    output: Vec<f64>,
}

impl Mlp {
    pub fn new<R: Rng + ?Sized>(
        inputs: usize,
        outputs: usize,
        config: &MlpConfig,
        rng: &mut R,
    ) -> Self {
        let hidden = config.hidden;
        Self {
            inputs,
            hidden,
            outputs,
            w_hidden: init_uniform(rng, hidden * inputs, inputs),
            b_hidden: init_uniform(rng, hidden, inputs),
            w_out: init_uniform(rng, outputs * hidden, hidden),
            b_out: init_uniform(rng, outputs, hidden),
            learning_rate: config.learning_rate,
            momentum: config.momentum,
            epochs: config.epochs,
            velocity: None,
        }
    }

    /// All-zero weights and biases.
    pub fn zeros(inputs: usize, outputs: usize, config: &MlpConfig) -> Self {
        let hidden = config.hidden;
        Self {
            inputs,
            hidden,
            outputs,
            w_hidden: vec![0.0; hidden * inputs],
            b_hidden: vec![0.0; hidden],
            w_out: vec![0.0; outputs * hidden],
            b_out: vec![0.0; outputs],
            learning_rate: config.learning_rate,
            momentum: config.momentum,
            epochs: config.epochs,
            velocity: None,
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.w_hidden.len() + self.b_hidden.len() + self.w_out.len() + self.b_out.len()
    }

    pub(crate) fn tensors(&self) -> [&Vec<f64>; 4] {
        [&self.w_hidden, &self.b_hidden, &self.w_out, &self.b_out]
    }

    pub(crate) fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        vec![
            &mut self.w_hidden,
            &mut self.b_hidden,
            &mut self.w_out,
            &mut self.b_out,
        ]
    }

    fn activations(&self, input: &[f64]) -> Activations {
        let mut hidden = self.b_hidden.clone();
        mat_vec_acc(&self.w_hidden, input, &mut hidden);
        hidden.iter_mut().for_each(|h| *h = sigmoid(*h));
        let mut output = self.b_out.clone();
        mat_vec_acc(&self.w_out, &hidden, &mut output);
        output.iter_mut().for_each(|o| *o = sigmoid(*o));
        Activations { hidden, output }
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        check_width(self.inputs, input.len())?;
        Ok(self.activations(input).output)
    }

    pub fn sample_loss(&self, sample: &Sample) -> f64 {
        squared_error(&self.activations(&sample.0).output, &sample.1)
    }

    pub fn mean_loss(&self, samples: &[Sample]) -> f64 {
        samples.iter().map(|s| self.sample_loss(s)).sum::<f64>() / samples.len() as f64
    }

    /// Loss and gradient for one sample, gradient ordered like `tensors()`.
    pub(crate) fn sample_gradient(&self, sample: &Sample, grads: &mut [Vec<f64>]) -> f64 {
        let (input, target) = sample;
        let act = self.activations(input);
        let loss = squared_error(&act.output, target);

        let delta_out: Vec<f64> = act
            .output
            .iter()
            .zip(target)
            .map(|(y, t)| (y - t) * y * (1.0 - y))
            .collect();
        let mut delta_hidden = vec![0.0; self.hidden];
        mat_t_vec_acc(&self.w_out, &delta_out, &mut delta_hidden);
        for (d, h) in delta_hidden.iter_mut().zip(&act.hidden) {
            *d *= h * (1.0 - h);
        }

        outer_acc(&mut grads[0], &delta_hidden, input);
        add_into(&mut grads[1], &delta_hidden);
        outer_acc(&mut grads[2], &delta_out, &act.hidden);
        add_into(&mut grads[3], &delta_out);
        loss
    }

    pub(crate) fn zero_gradients(&self) -> Vec<Vec<f64>> {
        self.tensors().iter().map(|t| vec![0.0; t.len()]).collect()
    }

    fn check_samples(&self, samples: &[Sample]) -> Result<()> {
        if samples.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        for (x, t) in samples {
            check_width(self.inputs, x.len())?;
            check_width(self.outputs, t.len())?;
        }
        Ok(())
    }

    /// Online gradient descent with momentum over `self.epochs` epochs,
    /// sample order reshuffled every epoch.
    pub fn train<R: Rng + ?Sized>(&mut self, samples: &[Sample], rng: &mut R) -> Result<TrainReport> {
        self.check_samples(samples)?;
        let mut velocity = self.velocity.take().unwrap_or_else(|| self.zero_gradients());
        let mut grads = self.zero_gradients();
        let mut order: Vec<usize> = (0..samples.len()).collect();
        let mut epoch_losses = Vec::with_capacity(self.epochs);

        for epoch in 0..self.epochs {
            order.shuffle(rng);
            let mut total = 0.0;
            for &i in &order {
                grads.iter_mut().for_each(|g| g.fill(0.0));
                total += self.sample_gradient(&samples[i], &mut grads);
                let (lr, mom) = (self.learning_rate, self.momentum);
                for ((p, g), v) in self.tensors_mut().into_iter().zip(&grads).zip(&mut velocity) {
                    for ((pi, gi), vi) in p.iter_mut().zip(g).zip(v.iter_mut()) {
                        *vi = mom * *vi - lr * gi;
                        *pi += *vi;
                    }
                }
            }
            let mean = total / samples.len() as f64;
            if !mean.is_finite() || !all_finite(&self.tensors()) {
                return Err(Error::Divergence { epoch });
            }
            epoch_losses.push(mean);
        }
        self.velocity = Some(velocity);

        let final_loss = self.mean_loss(samples);
        if !final_loss.is_finite() {
            return Err(Error::Divergence { epoch: self.epochs });
        }
        Ok(TrainReport {
            epoch_losses,
            final_loss,
            epochs: self.epochs,
        })
    }
}

fn squared_error(output: &[f64], target: &[f64]) -> f64 {
    0.5 * output
        .iter()
        .zip(target)
        .map(|(y, t)| (y - t) * (y - t))
        .sum::<f64>()
}

fn add_into(acc: &mut [f64], v: &[f64]) {
    acc.iter_mut().zip(v).for_each(|(a, b)| *a += b);
}
