use serde::{Deserialize, Serialize};

use crate::config::LstmConfig;

/// Adam with bias-corrected moments, one moment buffer per parameter tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step_count: u64,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(shapes: &[usize], config: &LstmConfig) -> Self {
        Self {
            learning_rate: config.learning_rate,
            beta1: config.beta1,
            beta2: config.beta2,
            epsilon: config.epsilon,
            step_count: 0,
            first_moment: shapes.iter().map(|n| vec![0.0; *n]).collect(),
            second_moment: shapes.iter().map(|n| vec![0.0; *n]).collect(),
        }
    }

    pub fn moment_shapes(&self) -> Vec<usize> {
        self.first_moment.iter().map(Vec::len).collect()
    }

    pub fn step(&mut self, params: Vec<&mut Vec<f64>>, grads: &[Vec<f64>]) {
        debug_assert_eq!(params.len(), grads.len());
        self.step_count += 1;
        let t = self.step_count as i32;
        let correct1 = 1.0 - self.beta1.powi(t);
        let correct2 = 1.0 - self.beta2.powi(t);
        let (b1, b2) = (self.beta1, self.beta2);
        for (((p, g), m), v) in params
            .into_iter()
            .zip(grads)
            .zip(&mut self.first_moment)
            .zip(&mut self.second_moment)
        {
            for (((pi, gi), mi), vi) in p.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut()) {
                *mi = b1 * *mi + (1.0 - b1) * gi;
                *vi = b2 * *vi + (1.0 - b2) * gi * gi;
                let m_hat = *mi / correct1;
                let v_hat = *vi / correct2;
                *pi -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adam(lr: f64) -> Adam {
        Adam::new(
            &[2],
            &LstmConfig {
                learning_rate: lr,
                ..LstmConfig::default()
            },
        )
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
        let mut opt = adam(0.01);
        let mut p = vec![1.0, -1.0];
        opt.step(vec![&mut p], &[vec![3.0, -0.5]]);
        let expect0 = 1.0 - 0.01 * 3.0 / (3.0 + 1e-8);
        let expect1 = -1.0 + 0.01 * 0.5 / (0.5 + 1e-8);
        assert!((p[0] - expect0).abs() < 1e-15);
        assert!((p[1] - expect1).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut opt = adam(0.1);
        let mut p = vec![0.3, 0.7];
        for _ in 0..10 {
            opt.step(vec![&mut p], &[vec![0.0, 0.0]]);
        }
        assert_eq!(p, vec![0.3, 0.7]);
        assert_eq!(opt.step_count, 10);
    }

    #[test]
    fn minimizes_a_quadratic() {
        let mut opt = adam(0.05);
        let mut p = vec![4.0, -3.0];
        for _ in 0..2000 {
            let g = vec![2.0 * p[0], 2.0 * p[1]];
            opt.step(vec![&mut p], &[g]);
        }
        assert!(p[0].abs() < 1e-2 && p[1].abs() < 1e-2, "{p:?}");
    }
}
