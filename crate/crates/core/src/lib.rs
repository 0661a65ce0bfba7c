//! Modular maze-learning benchmark.
//!
//! A maze opens with a context room whose marked door must be chosen again
//! at the end, after an intervening maze. Mazes learned standalone are
//! embedded between context rooms only at test time, which probes whether a
//! learner can compose separately learned modules. Two learners compete: an
//! LSTM and a dual-network sliding-window model with greatest-response
//! arbitration.

pub mod config;
pub mod encoder;
pub mod error;
pub mod harness;
pub mod maze;
pub mod models;
pub mod neural;

pub use config::{LstmConfig, MlpConfig, TaskConfig};
pub use error::{Error, Result};
