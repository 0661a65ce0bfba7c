use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use maze_modularity::encoder::WindowAlignment;
use maze_modularity::harness::{
    evaluate_model, run_sweep, score, trial_seed, write_sweep_outputs, Feature, SweepSpec,
};
use maze_modularity::maze::{generate_dataset, Dataset};
use maze_modularity::models::{Checkpoint, Model, ModelKind};
use maze_modularity::neural::{tiny_gradient_check, GradCheckKind};
use maze_modularity::{Error, Result, TaskConfig};

#[derive(Debug, Parser)]
#[command(name = "maze-modularity", version, about = "Modular maze-learning benchmark")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a dataset and write it as JSON.
    Generate {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one model and write a checkpoint.
    Train {
        #[arg(long)]
        model: ModelKind,
        /// Dataset JSON; generated from the task flags when absent.
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a checkpoint on a dataset's train and test sets.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[command(flatten)]
        task: TaskArgs,
    },
    /// Run a parameter sweep and write trial, summary and metadata files.
    Sweep {
        #[arg(long)]
        feature: Feature,
        /// Comma-separated, strictly increasing.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<usize>>,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "morphognosis,lstm")]
        models: Vec<ModelKind>,
        #[arg(long, env = "MAZE_MODULARITY_OUT", default_value = "results")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write wall-clock seconds into the CSVs (makes them non-reproducible).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        task: TaskArgs,
    },
    /// Compare analytic and finite-difference gradients on tiny models.
    Gradcheck {
        #[arg(long, default_value_t = 1e-5)]
        epsilon: f64,
        #[arg(long, default_value_t = 1e-4)]
        threshold: f64,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
    },
    /// Verify that the rule-based oracle solves generated datasets.
    OracleCheck {
        #[arg(long, default_value_t = 25)]
        seeds: usize,
        #[command(flatten)]
        task: TaskArgs,
    },
}

#[derive(Debug, Args)]
struct TaskArgs {
    /// JSON file with a (partial) task configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    num_doors: Option<usize>,
    #[arg(long)]
    maze_length: Option<usize>,
    #[arg(long)]
    num_context_mazes: Option<usize>,
    #[arg(long)]
    num_independent_mazes: Option<usize>,
    #[arg(long)]
    rng_seed: Option<u64>,
    #[arg(long, value_parser = parse_alignment)]
    window_alignment: Option<WindowAlignment>,
    #[arg(long)]
    mlp_hidden: Option<usize>,
    #[arg(long)]
    mlp_learning_rate: Option<f64>,
    #[arg(long)]
    mlp_momentum: Option<f64>,
    #[arg(long)]
    epochs_mlp: Option<usize>,
    #[arg(long)]
    lstm_hidden: Option<usize>,
    #[arg(long)]
    lstm_learning_rate: Option<f64>,
    #[arg(long)]
    epochs_lstm: Option<usize>,
}

fn parse_alignment(s: &str) -> std::result::Result<WindowAlignment, String> {
    match s {
        "start" => Ok(WindowAlignment::Start),
        "recent" => Ok(WindowAlignment::Recent),
        other => Err(format!("expected 'start' or 'recent', got '{other}'")),
    }
}

impl TaskArgs {
    fn resolve(&self) -> Result<TaskConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                serde_json::from_str(&text).map_err(|source| Error::Json {
                    path: path.clone(),
                    source,
                })?
            }
            None => TaskConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag { c.$field = v; })*
            };
        }
        set! {
            num_doors => num_doors,
            maze_length => maze_length,
            num_context_mazes => num_context_mazes,
            num_independent_mazes => num_independent_mazes,
            rng_seed => rng_seed,
        }
        self.apply_model_flags(&mut c);
        c.validate()?;
        Ok(c)
    }

    fn has_generation_flags(&self) -> bool {
        self.config.is_some()
            || self.num_doors.is_some()
            || self.maze_length.is_some()
            || self.num_context_mazes.is_some()
            || self.num_independent_mazes.is_some()
            || self.rng_seed.is_some()
    }

    fn apply_model_flags(&self, c: &mut TaskConfig) {
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag { c.$($field).+ = v; })*
            };
        }
        set! {
            window_alignment => window_alignment,
            mlp_hidden => mlp.hidden,
            mlp_learning_rate => mlp.learning_rate,
            mlp_momentum => mlp.momentum,
            epochs_mlp => mlp.epochs,
            lstm_hidden => lstm.hidden,
            lstm_learning_rate => lstm.learning_rate,
            epochs_lstm => lstm.epochs,
        }
    }
}

pub enum Outcome {
    Success,
    VerificationFailed,
}

impl Outcome {
    pub fn code(&self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::VerificationFailed => 2,
        }
    }
}

pub fn exit_code(error: &Error) -> u8 {
    match error {
        Error::InvalidConfig(_) => 1,
        _ => 3,
    }
}

fn print_config(config: &TaskConfig) {
    eprintln!(
        "config: {}",
        serde_json::to_string(config).expect("config serializes")
    );
}

/// Loads `dataset` when given (model flags still apply on top of its
/// stored config), otherwise generates one from the task flags.
fn load_or_generate(dataset: Option<&Path>, task: &TaskArgs) -> Result<Dataset> {
    let ds = match dataset {
        Some(path) => {
            if task.has_generation_flags() {
                return Err(Error::InvalidConfig(
                    "generation flags cannot be combined with --dataset".into(),
                ));
            }
            let mut ds = Dataset::load(path)?;
            task.apply_model_flags(&mut ds.config);
            ds.config.validate()?;
            ds
        }
        None => generate_dataset(&task.resolve()?)?,
    };
    print_config(&ds.config);
    Ok(ds)
}

fn fmt_acc(acc: Option<f64>) -> String {
    acc.map_or_else(|| "n/a".into(), |a| format!("{a:.4}"))
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Generate { task, out } => {
            let config = task.resolve()?;
            print_config(&config);
            let ds = generate_dataset(&config)?;
            ds.save(&out)?;
            println!(
                "wrote {} ({} train, {} test sequences)",
                out.display(),
                ds.train.len(),
                ds.test.len()
            );
            Ok(Outcome::Success)
        }
        Command::Train {
            model,
            dataset,
            task,
            out,
        } => {
            let ds = load_or_generate(dataset.as_deref(), &task)?;
            let (trained, outcome) = evaluate_model(&ds, model)?;
            Checkpoint::new(trained).save(&out)?;
            println!(
                "{model}: train_acc={} test_acc={} ({:.1}s) -> {}",
                fmt_acc(Some(outcome.train_acc)),
                fmt_acc(outcome.test_acc),
                outcome.seconds,
                out.display()
            );
            Ok(Outcome::Success)
        }
        Command::Eval {
            checkpoint,
            dataset,
            task,
        } => {
            let model: Model = Checkpoint::load(&checkpoint)?.model;
            let ds = load_or_generate(dataset.as_deref(), &task)?;
            if *model.dims() != ds.dims {
                return Err(Error::InvalidConfig(
                    "checkpoint dimensions do not match the dataset".into(),
                ));
            }
            let train = score(&model.predict_all(&ds.train)?, &ds.train)?;
            let test = score(&model.predict_all(&ds.test)?, &ds.test)?;
            println!(
                "{}: train_acc={} test_acc={}",
                model.kind(),
                fmt_acc(train),
                fmt_acc(test)
            );
            Ok(Outcome::Success)
        }
        Command::Sweep {
            feature,
            values,
            trials,
            models,
            out,
            jobs,
            timing,
            task,
        } => {
            let base = task.resolve()?;
            let spec = SweepSpec {
                values: values.unwrap_or_else(|| feature.default_values()),
                trials,
                models,
                ..SweepSpec::new(feature, base)
            };
            spec.validate()?;
            eprintln!(
                "sweep: {}",
                serde_json::to_string(&spec).expect("spec serializes")
            );
            let result = run_sweep(&spec, jobs)?;
            let files = write_sweep_outputs(&spec, &result, &out, timing)?;
            for cell in &result.cells {
                println!(
                    "{}={} {}: train={:.4} test={}",
                    feature,
                    cell.feature_value,
                    cell.model,
                    cell.train_mean,
                    fmt_acc(cell.test_mean)
                );
            }
            println!(
                "wrote {}, {}, {}",
                files.trials.display(),
                files.summary.display(),
                files.metadata.display()
            );
            Ok(Outcome::Success)
        }
        Command::Gradcheck {
            epsilon,
            threshold,
            seeds,
        } => {
            let mut ok = true;
            for kind in [GradCheckKind::Mlp, GradCheckKind::Lstm] {
                let mut worst: f64 = 0.0;
                for seed in 0..seeds {
                    worst = worst.max(tiny_gradient_check(kind, seed, epsilon)?);
                }
                let pass = worst < threshold;
                ok &= pass;
                println!(
                    "{kind:?}: max relative error {worst:.3e} ({})",
                    if pass { "pass" } else { "FAIL" }
                );
            }
            Ok(if ok {
                Outcome::Success
            } else {
                Outcome::VerificationFailed
            })
        }
        Command::OracleCheck { seeds, task } => {
            let base = task.resolve()?;
            print_config(&base);
            let mut ok = true;
            for s in 0..seeds {
                let config = TaskConfig {
                    rng_seed: trial_seed(base.rng_seed, 0, s),
                    ..base.clone()
                };
                let ds = generate_dataset(&config)?;
                let (_, outcome) = evaluate_model(&ds, ModelKind::Oracle)?;
                let pass = outcome.train_acc == 1.0 && outcome.test_acc.is_none_or(|a| a == 1.0);
                ok &= pass;
                if !pass {
                    println!(
                        "seed {}: train={} test={}",
                        config.rng_seed,
                        outcome.train_acc,
                        fmt_acc(outcome.test_acc)
                    );
                }
            }
            println!(
                "oracle-check: {seeds} seeds {}",
                if ok { "pass" } else { "FAIL" }
            );
            Ok(if ok {
                Outcome::Success
            } else {
                Outcome::VerificationFailed
            })
        }
    }
}
