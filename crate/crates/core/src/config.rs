//! Task, model and training parameters.
//!
//! Defaults are the reference experiment: five doors, intervening mazes of
//! five interior rooms, ten context-attached plus ten independent mazes, a
//! 50-unit perceptron trained for 5000 epochs and a 128-unit LSTM trained
//! with Adam for 1000 epochs.

use serde::{Deserialize, Serialize};

use crate::encoder::WindowAlignment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden: 50,
            learning_rate: 0.1,
            momentum: 0.2,
            epochs: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LstmConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
}

impl Default for LstmConfig {
    fn default() -> Self {
        Self {
            hidden: 128,
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskConfig {
    pub num_doors: usize,
    /// Interior rooms per intervening maze; the entry room is extra.
    pub maze_length: usize,
    pub num_context_mazes: usize,
    pub num_independent_mazes: usize,
    pub rng_seed: u64,
    /// Slot order of the sequence network's window.
    pub window_alignment: WindowAlignment,
    pub mlp: MlpConfig,
    pub lstm: LstmConfig,
}

impl Default for TaskConfig {
    fn default() -> Self {
        Self {
            num_doors: 5,
            maze_length: 5,
            num_context_mazes: 10,
            num_independent_mazes: 10,
            rng_seed: 4517,
            window_alignment: WindowAlignment::default(),
            mlp: MlpConfig::default(),
            lstm: LstmConfig::default(),
        }
    }
}

impl TaskConfig {
    pub fn num_mazes(&self) -> usize {
        self.num_context_mazes + self.num_independent_mazes
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_doors < 2 {
            return Err(Error::InvalidConfig(format!(
                "num_doors must be at least 2, got {}",
                self.num_doors
            )));
        }
        if self.mlp.hidden == 0 || self.lstm.hidden == 0 {
            return Err(Error::InvalidConfig("hidden width must be positive".into()));
        }
        let rates = [
            ("mlp.learning_rate", self.mlp.learning_rate),
            ("mlp.momentum", self.mlp.momentum),
            ("lstm.learning_rate", self.lstm.learning_rate),
        ];
        for (name, value) in rates {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        if !(0.0..1.0).contains(&self.lstm.beta1) || !(0.0..1.0).contains(&self.lstm.beta2) {
            return Err(Error::InvalidConfig("Adam betas must lie in [0, 1)".into()));
        }
        if !(self.lstm.epsilon > 0.0) {
            return Err(Error::InvalidConfig("Adam epsilon must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_reference_values() {
        let c = TaskConfig::default();
        assert_eq!(
            (c.num_doors, c.maze_length, c.num_context_mazes, c.num_independent_mazes),
            (5, 5, 10, 10)
        );
        assert_eq!(c.mlp.hidden, 50);
        assert_eq!(c.mlp.learning_rate, 0.1);
        assert_eq!(c.mlp.momentum, 0.2);
        assert_eq!(c.mlp.epochs, 5000);
        assert_eq!(c.lstm.hidden, 128);
        assert_eq!(c.lstm.epochs, 1000);
        assert_eq!((c.lstm.beta1, c.lstm.beta2, c.lstm.epsilon), (0.9, 0.999, 1e-8));
        c.validate().unwrap();
    }

    #[test]
    fn rejects_single_door() {
        let c = TaskConfig {
            num_doors: 1,
            ..TaskConfig::default()
        };
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: TaskConfig = serde_json::from_str(r#"{"num_doors": 3, "mlp": {"epochs": 10}}"#).unwrap();
        assert_eq!(c.num_doors, 3);
        assert_eq!(c.mlp.epochs, 10);
        assert_eq!(c.mlp.hidden, 50);
        assert_eq!(c.maze_length, 5);
    }
}
