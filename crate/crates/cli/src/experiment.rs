//! Turns a configuration into training runs, one per (layer setting, seed).

use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use reupload_core::circuit::{CircuitSpec, EncodingLadder};
use reupload_core::data::{
    apply_assignment, choose_classes, filter_classes, parse_digits_csv, pca_fit_transform, regression_grid, rings, split,
    stripes, LabelAssignment, LabeledDataset,
};
use reupload_core::learn::{train, Readout, RunRecord, Summary, TrainConfig};
use reupload_core::qubitmap::qubit_label_states;
use reupload_core::rng::{stream, Purpose};

use crate::config::{DigitClasses, ExperimentConfig, LabelMode, LadderMode, ReadoutMode, TaskKind};
use crate::error::{CliError, Result};

/// Reads a digits CSV file.
pub fn load_digits(path: &Path) -> Result<LabeledDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_digits_csv(&text).map_err(|e| match e {
        reupload_core::Error::Parse { line, message } => {
            CliError::Failed(format!("{}: line {line}: {message}", path.display()))
        }
        other => other.into(),
    })
}

/// Outcome of one seed of one setting.
#[derive(Clone, Debug)]
pub struct SeedRun {
    pub setting: usize,
    pub seed: u64,
    pub spec: CircuitSpec,
    /// Class label → qudit basis index.
    pub assignment: Vec<usize>,
    pub outcome: Result<RunRecord, String>,
}

impl SeedRun {
    /// Test metric when there is a test set, train metric otherwise.
    pub fn headline(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|r| r.test_metric.unwrap_or(r.train_metric))
    }
}

#[derive(Clone, Debug)]
pub struct Experiment {
    config: ExperimentConfig,
    /// Filtered and relabelled digits, when the task needs them.
    digits: Option<LabeledDataset>,
    digit_classes: Vec<usize>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let digits = match &config.task {
            TaskKind::Digits { path, .. } => Some(load_digits(path)?),
            _ => None,
        };
        Experiment::with_digits(config, digits)
    }

    /// Like [`Experiment::new`] with the raw digits supplied by the caller.
    pub fn with_digits(config: ExperimentConfig, raw_digits: Option<LabeledDataset>) -> Result<Self> {
        let (digits, digit_classes) = match (&config.task, raw_digits) {
            (TaskKind::Digits { classes, .. }, Some(raw)) => {
                let chosen = match classes {
                    DigitClasses::Explicit(list) => list.clone(),
                    DigitClasses::Random { count, subset_seed } => {
                        choose_classes(*count, &mut stream(*subset_seed, Purpose::Data))?
                    }
                };
                let filtered = filter_classes(&raw, &chosen)?;
                let needed = config.train_samples + config.test_samples;
                if filtered.len() < needed {
                    return Err(CliError::Failed(format!(
                        "digits {chosen:?} have {} samples, {needed} requested",
                        filtered.len()
                    )));
                }
                (Some(filtered), chosen)
            }
            (TaskKind::Digits { .. }, None) => return Err(CliError::Failed("digits task without data".into())),
            _ => (None, Vec::new()),
        };
        Ok(Experiment { config, digits, digit_classes })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    /// Digits used by a digits task, ascending.
    pub fn digit_classes(&self) -> &[usize] {
        &self.digit_classes
    }

    pub fn train_config(&self, seed: u64) -> Result<TrainConfig> {
        let c = &self.config;
        let readout = match c.readout {
            ReadoutMode::Basis => Readout::Basis,
            ReadoutMode::QubitLabels => Readout::LabelStates(qubit_label_states(c.classes)?),
        };
        Ok(TrainConfig {
            loss: c.loss,
            learning_rate: c.learning_rate,
            beta1: c.beta1,
            beta2: c.beta2,
            epsilon: c.epsilon,
            epochs: c.epochs,
            seed,
            init_range: c.init_range,
            readout,
            output_shift: c.output_shift,
        })
    }

    pub fn spec(&self, layers: usize, seed: u64) -> Result<CircuitSpec> {
        let c = &self.config;
        let mut spec = CircuitSpec::new(c.dim, c.task.input_dim(), layers, c.arch)?.with_squeeze(c.squeeze);
        if c.ladder == LadderMode::Randomized {
            let mut perm: Vec<usize> = (0..c.dim).collect();
            perm.shuffle(&mut stream(seed, Purpose::Ladder));
            spec = spec.with_ladder(EncodingLadder::Randomized(perm));
        }
        Ok(spec)
    }

    pub fn assignment(&self, seed: u64) -> LabelAssignment {
        match self.config.labels {
            LabelMode::Aligned => LabelAssignment::aligned(self.config.dim),
            LabelMode::Randomized => LabelAssignment::randomized(self.config.dim, seed),
        }
    }

    /// Train and test sets of one seed, with labels already mapped to basis indices.
    pub fn datasets(&self, seed: u64) -> Result<(LabeledDataset, Option<LabeledDataset>)> {
        let c = &self.config;
        let mut rng = stream(seed, Purpose::Data);
        let n = c.train_samples + c.test_samples;
        let (train_set, test_set) = match &c.task {
            TaskKind::Regression { points } => return Ok((regression_grid(*points)?, None)),
            TaskKind::Stripes { angle } => {
                let all = stripes(n, c.classes, *angle, &mut rng)?;
                split(&all, c.train_samples, c.test_samples, &mut rng)?
            }
            TaskKind::Rings { center } => {
                let all = rings(n, c.classes, *center, &mut rng)?;
                split(&all, c.train_samples, c.test_samples, &mut rng)?
            }
            TaskKind::Digits { pca_dim, .. } => {
                let all = self.digits.as_ref().expect("digits loaded at construction");
                let (tr, te) = split(all, c.train_samples, c.test_samples, &mut rng)?;
                let (tr, model) = pca_fit_transform(&tr, *pca_dim)?;
                let te = model.transform(&te)?;
                (tr, te)
            }
        };
        if c.readout == ReadoutMode::QubitLabels {
            return Ok((train_set, Some(test_set)));
        }
        let assignment = self.assignment(seed);
        Ok((apply_assignment(&train_set, &assignment)?, Some(apply_assignment(&test_set, &assignment)?)))
    }

    /// Trains one seed; a training failure is kept in the outcome.
    pub fn run_one(&self, setting: usize, seed: u64) -> Result<SeedRun> {
        let spec = self.spec(self.config.layers[setting], seed)?;
        let assignment = self.assignment(seed).permutation().to_vec();
        let outcome = self.train_seed(&spec, seed).map_err(|e| e.to_string());
        Ok(SeedRun { setting, seed, spec, assignment, outcome })
    }

    fn train_seed(&self, spec: &CircuitSpec, seed: u64) -> Result<RunRecord> {
        let (tr, te) = self.datasets(seed)?;
        Ok(train(spec, &tr, te.as_ref(), &self.train_config(seed)?)?)
    }

    /// Every (setting, seed) pair, ordered by setting then by seed position.
    pub fn run_all(&self) -> Result<Vec<SeedRun>> {
        let jobs: Vec<(usize, u64)> = (0..self.config.layers.len())
            .flat_map(|s| self.config.seeds.iter().map(move |&seed| (s, seed)))
            .collect();
        jobs.par_iter().map(|&(s, seed)| self.run_one(s, seed)).collect()
    }
}

/// Box statistics of the headline metric for each setting.
pub fn summarize(config: &ExperimentConfig, runs: &[SeedRun]) -> Vec<Option<Summary>> {
    (0..config.layers.len())
        .map(|s| {
            let values: Vec<f64> = runs.iter().filter(|r| r.setting == s).filter_map(SeedRun::headline).collect();
            Summary::from_values(&values)
        })
        .collect()
}
