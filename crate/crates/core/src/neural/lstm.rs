use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{all_finite, init_uniform, mat_t_vec_acc, mat_vec_acc, outer_acc, sigmoid, Adam, TrainReport};
use crate::config::LstmConfig;
use crate::encoder::check_width;
use crate::error::{Error, Result};

/// `(inputs, targets)`, one vector of each per time step.
pub type SequenceSample = (Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Single-layer LSTM with a sigmoid read-out at every step.
///
/// Gate blocks are stacked `[input, forget, candidate, output]` along the
/// rows of `w_input` (`4h x n`), `w_recurrent` (`4h x h`) and `bias`.
/// The loss of a sequence is the squared error averaged over steps and
/// output units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lstm {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
    pub w_input: Vec<f64>,
    pub w_recurrent: Vec<f64>,
    pub bias: Vec<f64>,
    /// `outputs x hidden`.
    pub w_out: Vec<f64>,
    pub b_out: Vec<f64>,
    pub epochs: usize,
    pub adam: Adam,
}

struct StepCache {
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    /// Post-activation gates, laid out like `bias`.
    gates: Vec<f64>,
    tanh_c: Vec<f64>,
    h: Vec<f64>,
    y: Vec<f64>,
}

impl Lstm {
    pub fn new<R: Rng + ?Sized>(inputs: usize, outputs: usize, config: &LstmConfig, rng: &mut R) -> Self {
        let h = config.hidden;
        let fan_in = inputs + h;
        let mut bias = vec![0.0; 4 * h];
        // unit forget bias
        bias[h..2 * h].fill(1.0);
        let mut net = Self {
            inputs,
            hidden: h,
            outputs,
            w_input: init_uniform(rng, 4 * h * inputs, fan_in),
            w_recurrent: init_uniform(rng, 4 * h * h, fan_in),
            bias,
            w_out: init_uniform(rng, outputs * h, h),
            b_out: vec![0.0; outputs],
            epochs: config.epochs,
            adam: Adam::new(&[], config),
        };
        net.adam = Adam::new(&net.shapes(), config);
        net
    }

    pub fn zeros(inputs: usize, outputs: usize, config: &LstmConfig) -> Self {
        let h = config.hidden;
        let mut net = Self {
            inputs,
            hidden: h,
            outputs,
            w_input: vec![0.0; 4 * h * inputs],
            w_recurrent: vec![0.0; 4 * h * h],
            bias: vec![0.0; 4 * h],
            w_out: vec![0.0; outputs * h],
            b_out: vec![0.0; outputs],
            epochs: config.epochs,
            adam: Adam::new(&[], config),
        };
        net.adam = Adam::new(&net.shapes(), config);
        net
    }

    fn shapes(&self) -> Vec<usize> {
        self.tensors().iter().map(|t| t.len()).collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.shapes().iter().sum()
    }

    pub(crate) fn tensors(&self) -> [&Vec<f64>; 5] {
        [&self.w_input, &self.w_recurrent, &self.bias, &self.w_out, &self.b_out]
    }

    pub(crate) fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        vec![
            &mut self.w_input,
            &mut self.w_recurrent,
            &mut self.bias,
            &mut self.w_out,
            &mut self.b_out,
        ]
    }

    fn optimizer_and_params(&mut self) -> (&mut Adam, Vec<&mut Vec<f64>>) {
        let Self {
            w_input,
            w_recurrent,
            bias,
            w_out,
            b_out,
            adam,
            ..
        } = self;
        (adam, vec![w_input, w_recurrent, bias, w_out, b_out])
    }

    pub(crate) fn zero_gradients(&self) -> Vec<Vec<f64>> {
        self.shapes().into_iter().map(|n| vec![0.0; n]).collect()
    }

    fn step(&self, x: &[f64], h_prev: Vec<f64>, c_prev: Vec<f64>) -> StepCache {
        let hd = self.hidden;
        let mut gates = self.bias.clone();
        mat_vec_acc(&self.w_input, x, &mut gates);
        mat_vec_acc(&self.w_recurrent, &h_prev, &mut gates);
        for (k, a) in gates.iter_mut().enumerate() {
            *a = if (2 * hd..3 * hd).contains(&k) { a.tanh() } else { sigmoid(*a) };
        }
        let (i, rest) = gates.split_at(hd);
        let (f, rest) = rest.split_at(hd);
        let (g, o) = rest.split_at(hd);
        let mut tanh_c = vec![0.0; hd];
        let mut h = vec![0.0; hd];
        for j in 0..hd {
            let c = f[j] * c_prev[j] + i[j] * g[j];
            tanh_c[j] = c.tanh();
            h[j] = o[j] * tanh_c[j];
        }
        let mut y = self.b_out.clone();
        mat_vec_acc(&self.w_out, &h, &mut y);
        y.iter_mut().for_each(|v| *v = sigmoid(*v));
        StepCache {
            h_prev,
            c_prev,
            gates,
            tanh_c,
            h,
            y,
        }
    }

    fn run(&self, inputs: &[Vec<f64>]) -> Vec<StepCache> {
        let mut caches: Vec<StepCache> = Vec::with_capacity(inputs.len());
        let mut h = vec![0.0; self.hidden];
        let mut c = vec![0.0; self.hidden];
        for x in inputs {
            let cache = self.step(x, h, c);
            h = cache.h.clone();
            c = cell_state(&cache, self.hidden);
            caches.push(cache);
        }
        caches
    }

    pub fn forward(&self, inputs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        for x in inputs {
            check_width(self.inputs, x.len())?;
        }
        Ok(self.run(inputs).into_iter().map(|c| c.y).collect())
    }

    pub fn sequence_loss(&self, sample: &SequenceSample) -> f64 {
        let outputs: Vec<Vec<f64>> = self.run(&sample.0).into_iter().map(|c| c.y).collect();
        mean_squared_error(&outputs, &sample.1)
    }

    pub fn mean_loss(&self, samples: &[SequenceSample]) -> f64 {
        samples.iter().map(|s| self.sequence_loss(s)).sum::<f64>() / samples.len() as f64
    }

    /// Accumulates `scale * dL/dθ` for one sequence into `grads` by
    /// backpropagation through time; returns the unscaled loss.
    pub(crate) fn sequence_gradient(&self, sample: &SequenceSample, scale: f64, grads: &mut [Vec<f64>]) -> f64 {
        let (inputs, targets) = sample;
        let hd = self.hidden;
        let caches = self.run(inputs);
        let outputs: Vec<&Vec<f64>> = caches.iter().map(|c| &c.y).collect();
        let steps = inputs.len();
        let loss = outputs
            .iter()
            .zip(targets)
            .map(|(y, t)| y.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .sum::<f64>()
            / (steps * self.outputs) as f64;
        let norm = 2.0 * scale / (steps * self.outputs) as f64;

        let mut dh_next = vec![0.0; hd];
        let mut dc_next = vec![0.0; hd];
        let mut dgates = vec![0.0; 4 * hd];
        let mut dh = vec![0.0; hd];
        for t in (0..steps).rev() {
            let cache = &caches[t];
            let dz: Vec<f64> = cache
                .y
                .iter()
                .zip(&targets[t])
                .map(|(y, tv)| norm * (y - tv) * y * (1.0 - y))
                .collect();
            outer_acc(&mut grads[3], &dz, &cache.h);
            grads[4].iter_mut().zip(&dz).for_each(|(g, d)| *g += d);

            dh.copy_from_slice(&dh_next);
            mat_t_vec_acc(&self.w_out, &dz, &mut dh);

            let g = &cache.gates;
            for j in 0..hd {
                let (i, f, cand, o) = (g[j], g[hd + j], g[2 * hd + j], g[3 * hd + j]);
                let tc = cache.tanh_c[j];
                let dc = dh[j] * o * (1.0 - tc * tc) + dc_next[j];
                dgates[j] = dc * cand * i * (1.0 - i);
                dgates[hd + j] = dc * cache.c_prev[j] * f * (1.0 - f);
                dgates[2 * hd + j] = dc * i * (1.0 - cand * cand);
                dgates[3 * hd + j] = dh[j] * tc * o * (1.0 - o);
                dc_next[j] = dc * f;
            }
            outer_acc(&mut grads[0], &dgates, &inputs[t]);
            outer_acc(&mut grads[1], &dgates, &cache.h_prev);
            grads[2].iter_mut().zip(&dgates).for_each(|(g, d)| *g += d);

            dh_next.fill(0.0);
            mat_t_vec_acc(&self.w_recurrent, &dgates, &mut dh_next);
        }
        loss
    }

    fn check_samples(&self, samples: &[SequenceSample]) -> Result<()> {
        if samples.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        for (xs, ts) in samples {
            if xs.len() != ts.len() || xs.is_empty() {
                return Err(Error::Malformed(format!(
                    "sequence has {} inputs and {} targets",
                    xs.len(),
                    ts.len()
                )));
            }
            for (x, t) in xs.iter().zip(ts) {
                check_width(self.inputs, x.len())?;
                check_width(self.outputs, t.len())?;
            }
        }
        Ok(())
    }

    /// One Adam update per sequence, sequence order reshuffled every epoch.
    pub fn train<R: Rng + ?Sized>(&mut self, samples: &[SequenceSample], rng: &mut R) -> Result<TrainReport> {
        self.check_samples(samples)?;
        let mut grads = self.zero_gradients();
        let mut order: Vec<usize> = (0..samples.len()).collect();
        let mut epoch_losses = Vec::with_capacity(self.epochs);

        for epoch in 0..self.epochs {
            order.shuffle(rng);
            let mut total = 0.0;
            for &i in &order {
                grads.iter_mut().for_each(|g| g.fill(0.0));
                let loss = self.sequence_gradient(&samples[i], 1.0, &mut grads);
                if !loss.is_finite() {
                    return Err(Error::Divergence { epoch });
                }
                total += loss;
                let (adam, params) = self.optimizer_and_params();
                adam.step(params, &grads);
            }
            if !all_finite(&self.tensors()) {
                return Err(Error::Divergence { epoch });
            }
            epoch_losses.push(total / samples.len() as f64);
        }

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

fn cell_state(cache: &StepCache, hd: usize) -> Vec<f64> {
    let g = &cache.gates;
    (0..hd)
        .map(|j| g[hd + j] * cache.c_prev[j] + g[j] * g[2 * hd + j])
        .collect()
}

fn mean_squared_error(outputs: &[Vec<f64>], targets: &[Vec<f64>]) -> f64 {
    let count: usize = outputs.iter().map(Vec::len).sum();
    outputs
        .iter()
        .zip(targets)
        .flat_map(|(y, t)| y.iter().zip(t).map(|(a, b)| (a - b) * (a - b)))
        .sum::<f64>()
        / count as f64
}
