//! From-scratch networks: a one-hidden-layer perceptron trained online with
//! momentum, and an LSTM trained with Adam through full BPTT.

mod adam;
mod gradcheck;
mod lstm;
mod mlp;

pub use adam::Adam;
pub use gradcheck::{gradient_check, tiny_gradient_check, Differentiable, GradCheckKind};
pub use lstm::{Lstm, SequenceSample};
pub use mlp::{Mlp, Sample};

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean training loss of each epoch, accumulated while the epoch ran.
    pub epoch_losses: Vec<f64>,
    /// Mean loss over the training set after the last update.
    pub final_loss: f64,
    pub epochs: usize,
}

impl TrainReport {
    pub fn initial_loss(&self) -> Option<f64> {
        self.epoch_losses.first().copied()
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Uniform in `[-0.5 / sqrt(fan_in), 0.5 / sqrt(fan_in)]`.
pub(crate) fn init_uniform<R: Rng + ?Sized>(rng: &mut R, len: usize, fan_in: usize) -> Vec<f64> {
    let bound = 0.5 / (fan_in.max(1) as f64).sqrt();
    (0..len).map(|_| rng.gen_range(-bound..=bound)).collect()
}

/// `out += m * x` for a row-major `rows x x.len()` matrix.
#[inline]
pub(crate) fn mat_vec_acc(m: &[f64], x: &[f64], out: &mut [f64]) {
    let cols = x.len();
    for (row, o) in m.chunks_exact(cols).zip(out.iter_mut()) {
        *o += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// `out += m^T * y` for a row-major `y.len() x out.len()` matrix.
#[inline]
pub(crate) fn mat_t_vec_acc(m: &[f64], y: &[f64], out: &mut [f64]) {
    let cols = out.len();
    for (row, yv) in m.chunks_exact(cols).zip(y) {
        if *yv == 0.0 {
            continue;
        }
        for (o, a) in out.iter_mut().zip(row) {
            *o += a * yv;
        }
    }
}

/// `g += y x^T`.
#[inline]
pub(crate) fn outer_acc(g: &mut [f64], y: &[f64], x: &[f64]) {
    let cols = x.len();
    for (row, yv) in g.chunks_exact_mut(cols).zip(y) {
        if *yv == 0.0 {
            continue;
        }
        for (gv, xv) in row.iter_mut().zip(x) {
            *gv += yv * xv;
        }
    }
}

pub(crate) fn all_finite(tensors: &[&Vec<f64>]) -> bool {
    tensors.iter().all(|t| t.iter().all(|v| v.is_finite()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_bounded() {
        assert_eq!(sigmoid(0.0), 0.5);
        for x in [-30.0, -1.0, 1.0, 30.0] {
            let s = sigmoid(x);
            assert!(s > 0.0 && s < 1.0);
        }
    }

    #[test]
    fn matrix_helpers_match_hand_computation() {
        // [[1 2 3],[4 5 6]]
        let m = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let mut out = [0.0; 2];
        mat_vec_acc(&m, &[1.0, 0.0, -1.0], &mut out);
        assert_eq!(out, [-2.0, -2.0]);
        let mut back = [0.0; 3];
        mat_t_vec_acc(&m, &[1.0, 2.0], &mut back);
        assert_eq!(back, [9.0, 12.0, 15.0]);
        let mut g = [0.0; 6];
        outer_acc(&mut g, &[1.0, 2.0], &[3.0, 4.0, 5.0]);
        assert_eq!(g, [3.0, 4.0, 5.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn init_respects_fan_in_bound() {
        let mut rng = rand::rngs::mock::StepRng::new(0, 1 << 40);
        let w = init_uniform(&mut rng, 200, 25);
        assert!(w.iter().all(|v| v.abs() <= 0.1));
    }
}
