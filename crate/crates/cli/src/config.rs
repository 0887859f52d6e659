//! Experiment configuration files.
//!
//! Line-oriented `key = value` pairs grouped under `[task]`, `[circuit]`,
//! `[train]` and `[run]` headers. `#` starts a comment. Lists are
//! comma-separated; integer lists also accept inclusive ranges such as
//! `1..20`. Every key is checked, and unknown keys are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use reupload_core::circuit::Architecture;
use reupload_core::data::DEFAULT_RING_CENTER;
use reupload_core::learn::Loss;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum TaskKind {
    Regression { points: usize },
    Stripes { angle: f64 },
    Rings { center: [f64; 2] },
    Digits { path: PathBuf, classes: DigitClasses, pca_dim: usize },
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::Regression { .. } => "regression",
            TaskKind::Stripes { .. } => "stripes",
            TaskKind::Rings { .. } => "rings",
            TaskKind::Digits { .. } => "digits",
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            TaskKind::Regression { .. } => 1,
            TaskKind::Stripes { .. } | TaskKind::Rings { .. } => 2,
            TaskKind::Digits { pca_dim, .. } => *pca_dim,
        }
    }

    pub fn is_classification(&self) -> bool {
        !matches!(self, TaskKind::Regression { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DigitClasses {
    Explicit(Vec<usize>),
    /// `count` digits drawn once from `subset_seed`.
    Random { count: usize, subset_seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelMode {
    Aligned,
    Randomized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderMode {
    Standard,
    Randomized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReadoutMode {
    Basis,
    QubitLabels,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    pub train_samples: usize,
    pub test_samples: usize,
    /// Number of class labels (classification only).
    pub classes: usize,
    pub labels: LabelMode,
    pub dim: usize,
    /// One setting per entry.
    pub layers: Vec<usize>,
    pub arch: Architecture,
    pub squeeze: bool,
    pub ladder: LadderMode,
    pub loss: Loss,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub init_range: (f64, f64),
    pub output_shift: f64,
    pub readout: ReadoutMode,
    pub seeds: Vec<u64>,
    pub output: PathBuf,
}

struct Entry {
    value: String,
    line: usize,
}

/// Raw `section.key → value` map with line numbers.
struct Raw {
    entries: BTreeMap<String, Entry>,
}

const KNOWN: &[&str] = &[
    "task.kind",
    "task.train_samples",
    "task.test_samples",
    "task.classes",
    "task.angle",
    "task.center",
    "task.grid_points",
    "task.digits_path",
    "task.digits",
    "task.random_digits",
    "task.subset_seed",
    "task.pca_dim",
    "task.labels",
    "circuit.dim",
    "circuit.layers",
    "circuit.arch",
    "circuit.squeeze",
    "circuit.ladder",
    "train.loss",
    "train.learning_rate",
    "train.beta1",
    "train.beta2",
    "train.epsilon",
    "train.epochs",
    "train.init_low",
    "train.init_high",
    "train.output_shift",
    "train.readout",
    "run.seeds",
    "run.output",
];

impl Raw {
    fn parse(text: &str) -> Result<Raw> {
        let mut section: Option<String> = None;
        let mut entries = BTreeMap::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::config(Some(line), None, "unterminated section header"))?
                    .trim();
                if !["task", "circuit", "train", "run"].contains(&name) {
                    return Err(CliError::config(Some(line), None, format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::config(Some(line), None, "expected `key = value`"))?;
            let sec = section
                .as_deref()
                .ok_or_else(|| CliError::config(Some(line), None, "key outside of any section"))?;
            let full = format!("{sec}.{}", key.trim());
            if !KNOWN.contains(&full.as_str()) {
                return Err(CliError::config(Some(line), Some(&full), "unknown key"));
            }
            let value = value.trim();
            if value.is_empty() {
                return Err(CliError::config(Some(line), Some(&full), "empty value"));
            }
            if let Some(prev) = entries.insert(full.clone(), Entry { value: value.to_string(), line }) {
                return Err(CliError::config(Some(line), Some(&full), format!("already set on line {}", prev.line)));
            }
        }
        Ok(Raw { entries })
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }

    fn err(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::config(self.line(key), Some(key), message)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| CliError::config(Some(e.line), Some(key), format!("cannot parse `{}`", e.value))),
        }
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| CliError::config(None, Some(key), "required key is missing"))
    }

    fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.entries.get(key).map(|e| e.value.as_str()) {
            None => Ok(default),
            Some("true" | "on" | "yes") => Ok(true),
            Some("false" | "off" | "no") => Ok(false),
            Some(other) => Err(self.err(key, format!("expected true or false, found `{other}`"))),
        }
    }

    fn choice<'a>(&self, key: &str, options: &[&'a str], default: Option<&'a str>) -> Result<&'a str> {
        match self.entries.get(key) {
            None => default.ok_or_else(|| CliError::config(None, Some(key), "required key is missing")),
            Some(e) => options
                .iter()
                .find(|o| **o == e.value)
                .copied()
                .ok_or_else(|| self.err(key, format!("expected one of {}, found `{}`", options.join(", "), e.value))),
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(e) = self.entries.get(key) else { return Ok(None) };
        e.value
            .split(',')
            .map(|item| {
                item.trim()
                    .parse()
                    .map_err(|_| CliError::config(Some(e.line), Some(key), format!("cannot parse list item `{}`", item.trim())))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    /// Comma-separated integers and inclusive `a..b` ranges.
    fn int_list(&self, key: &str) -> Result<Option<Vec<u64>>> {
        let Some(e) = self.entries.get(key) else { return Ok(None) };
        let bad = |item: &str| CliError::config(Some(e.line), Some(key), format!("cannot parse `{item}`"));
        let mut out = Vec::new();
        for item in e.value.split(',').map(str::trim) {
            if let Some((a, b)) = item.split_once("..") {
                let a: u64 = a.trim().parse().map_err(|_| bad(item))?;
                let b: u64 = b.trim().parse().map_err(|_| bad(item))?;
                if b < a {
                    return Err(bad(item));
                }
                out.extend(a..=b);
            } else {
                out.push(item.parse().map_err(|_| bad(item))?);
            }
        }
        Ok(Some(out))
    }
}

impl ExperimentConfig {
    /// Parses and validates a configuration. Relative paths are resolved
    /// against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let raw = Raw::parse(text)?;
        let kind = raw.choice("task.kind", &["regression", "stripes", "rings", "digits"], None)?;
        let dim: usize = raw.require("circuit.dim")?;
        if !(2..=16).contains(&dim) {
            return Err(raw.err("circuit.dim", "qudit dimension must lie in 2..=16"));
        }

        let only_for = |key: &str, allowed: &[&str]| -> Result<()> {
            if raw.has(key) && !allowed.contains(&kind) {
                return Err(raw.err(key, format!("not used by the {kind} task")));
            }
            Ok(())
        };
        only_for("task.angle", &["stripes"])?;
        only_for("task.center", &["rings"])?;
        only_for("task.grid_points", &["regression"])?;
        for key in ["task.digits_path", "task.digits", "task.random_digits", "task.subset_seed", "task.pca_dim"] {
            only_for(key, &["digits"])?;
        }
        for key in ["task.train_samples", "task.test_samples", "task.classes", "task.labels"] {
            only_for(key, &["stripes", "rings", "digits"])?;
        }

        let task = match kind {
            "regression" => {
                let points = raw.get_or("task.grid_points", 100)?;
                if points < 2 {
                    return Err(raw.err("task.grid_points", "need at least two points"));
                }
                TaskKind::Regression { points }
            }
            "stripes" => TaskKind::Stripes { angle: raw.get_or("task.angle", 0.0)? },
            "rings" => {
                let center = match raw.list::<f64>("task.center")? {
                    None => DEFAULT_RING_CENTER,
                    Some(c) if c.len() == 2 && c.iter().all(|v| (-1.0..=1.0).contains(v)) => [c[0], c[1]],
                    Some(_) => return Err(raw.err("task.center", "expected two coordinates in [-1, 1]")),
                };
                TaskKind::Rings { center }
            }
            _ => {
                let path: PathBuf = raw.require::<String>("task.digits_path")?.into();
                let path = if path.is_absolute() { path } else { base_dir.join(path) };
                let classes = match (raw.list::<usize>("task.digits")?, raw.get::<usize>("task.random_digits")?) {
                    (Some(_), Some(_)) => {
                        return Err(raw.err("task.random_digits", "set either task.digits or task.random_digits"))
                    }
                    (Some(list), None) => {
                        let mut sorted = list.clone();
                        sorted.sort_unstable();
                        sorted.dedup();
                        if sorted.len() != list.len() || sorted.iter().any(|&c| c > 9) || sorted.len() < 2 {
                            return Err(raw.err("task.digits", "expected at least two distinct digits 0-9"));
                        }
                        DigitClasses::Explicit(sorted)
                    }
                    (None, Some(count)) => {
                        if !(2..=10).contains(&count) {
                            return Err(raw.err("task.random_digits", "expected 2..=10"));
                        }
                        DigitClasses::Random { count, subset_seed: raw.get_or("task.subset_seed", 0)? }
                    }
                    (None, None) => return Err(CliError::config(None, Some("task.digits"), "set task.digits or task.random_digits")),
                };
                if raw.has("task.subset_seed") && !matches!(classes, DigitClasses::Random { .. }) {
                    return Err(raw.err("task.subset_seed", "only used with task.random_digits"));
                }
                let pca_dim = raw.get_or("task.pca_dim", 2)?;
                if !(1..=64).contains(&pca_dim) {
                    return Err(raw.err("task.pca_dim", "expected 1..=64"));
                }
                TaskKind::Digits { path, classes, pca_dim }
            }
        };

        let readout = match raw.choice("train.readout", &["basis", "qubit-labels"], Some("basis"))? {
            "basis" => ReadoutMode::Basis,
            _ => ReadoutMode::QubitLabels,
        };
        if readout == ReadoutMode::QubitLabels && dim != 2 {
            return Err(raw.err("train.readout", "qubit label states need circuit.dim = 2"));
        }
        let default_classes = match &task {
            TaskKind::Digits { classes: DigitClasses::Explicit(list), .. } => list.len(),
            TaskKind::Digits { classes: DigitClasses::Random { count, .. }, .. } => *count,
            _ => dim,
        };
        let classes = raw.get_or("task.classes", default_classes)?;
        if task.is_classification() {
            if classes != default_classes && matches!(task, TaskKind::Digits { .. }) {
                return Err(raw.err("task.classes", "must equal the number of selected digits"));
            }
            let capacity = if readout == ReadoutMode::QubitLabels { 6 } else { dim };
            if classes < 2 || classes > capacity {
                return Err(raw.err("task.classes", format!("expected 2..={capacity} classes")));
            }
            if readout == ReadoutMode::QubitLabels && ![2, 3, 4, 6].contains(&classes) {
                return Err(raw.err("task.classes", "qubit label sets exist for 2, 3, 4 or 6 classes"));
            }
        }
        let labels = match raw.choice("task.labels", &["aligned", "randomized"], Some("aligned"))? {
            "aligned" => LabelMode::Aligned,
            _ => LabelMode::Randomized,
        };
        if labels == LabelMode::Randomized && readout == ReadoutMode::QubitLabels {
            return Err(raw.err("task.labels", "label permutation applies to qudit basis readout only"));
        }
        let train_samples = raw.get_or("task.train_samples", 750)?;
        let test_samples = raw.get_or("task.test_samples", 250)?;
        if task.is_classification() && (train_samples == 0 || test_samples == 0) {
            return Err(CliError::config(None, Some("task.train_samples"), "train and test sets must be non-empty"));
        }

        let layers: Vec<usize> = raw
            .int_list("circuit.layers")?
            .ok_or_else(|| CliError::config(None, Some("circuit.layers"), "required key is missing"))?
            .into_iter()
            .map(|l| l as usize)
            .collect();
        if layers.is_empty() || layers.contains(&0) {
            return Err(raw.err("circuit.layers", "layer counts must be positive"));
        }
        if (1..layers.len()).any(|i| layers[..i].contains(&layers[i])) {
            return Err(raw.err("circuit.layers", "layer counts must be distinct"));
        }
        let arch: Architecture = raw
            .require::<String>("circuit.arch")?
            .parse()
            .map_err(|_| raw.err("circuit.arch", "expected euler, simplified or extended"))?;
        let squeeze = raw.bool_or("circuit.squeeze", true)?;
        if raw.has("circuit.squeeze") && arch == Architecture::Extended {
            return Err(raw.err("circuit.squeeze", "the extended architecture has no squeezing term"));
        }
        let ladder = match raw.choice("circuit.ladder", &["standard", "randomized"], Some("standard"))? {
            "standard" => LadderMode::Standard,
            _ => LadderMode::Randomized,
        };

        let default_loss = if task.is_classification() { "overlap" } else { "mse" };
        let loss = match raw.choice("train.loss", &["overlap", "mse"], Some(default_loss))? {
            "overlap" => Loss::Overlap,
            _ => Loss::Mse,
        };
        if loss == Loss::Overlap && !task.is_classification() {
            return Err(raw.err("train.loss", "regression needs the mse loss"));
        }
        if loss == Loss::Mse && readout == ReadoutMode::QubitLabels {
            return Err(raw.err("train.loss", "the expected label is undefined for qubit label states"));
        }
        let positive = |key: &str, v: f64| -> Result<f64> {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(raw.err(key, "must be positive and finite"))
            }
        };
        let unit = |key: &str, v: f64| -> Result<f64> {
            if (0.0..1.0).contains(&v) {
                Ok(v)
            } else {
                Err(raw.err(key, "must lie in [0, 1)"))
            }
        };
        let learning_rate = positive("train.learning_rate", raw.get_or("train.learning_rate", 0.05)?)?;
        let beta1 = unit("train.beta1", raw.get_or("train.beta1", 0.9)?)?;
        let beta2 = unit("train.beta2", raw.get_or("train.beta2", 0.999)?)?;
        let epsilon = positive("train.epsilon", raw.get_or("train.epsilon", 1e-8)?)?;
        let epochs = raw.get_or("train.epochs", 2000)?;
        if epochs == 0 {
            return Err(raw.err("train.epochs", "must be positive"));
        }
        let init_range = (raw.get_or("train.init_low", -PI)?, raw.get_or("train.init_high", PI)?);
        if !(init_range.0 < init_range.1 && init_range.0.is_finite() && init_range.1.is_finite()) {
            return Err(raw.err("train.init_high", "need init_low < init_high"));
        }
        // Centre the expected label on zero so it can reach targets in [-1, 1].
        let output_shift = raw.get_or("train.output_shift", -((dim - 1) as f64) / 2.0)?;
        if raw.has("train.output_shift") && task.is_classification() {
            return Err(raw.err("train.output_shift", "only used by regression"));
        }

        let seeds = raw
            .int_list("run.seeds")?
            .ok_or_else(|| CliError::config(None, Some("run.seeds"), "required key is missing"))?;
        let mut unique = seeds.clone();
        unique.sort_unstable();
        unique.dedup();
        if seeds.is_empty() || unique.len() != seeds.len() {
            return Err(raw.err("run.seeds", "seeds must be distinct"));
        }
        let output: PathBuf = raw.get_or("run.output", "output".to_string())?.into();
        let output = if output.is_absolute() { output } else { base_dir.join(output) };

        Ok(ExperimentConfig {
            task,
            train_samples,
            test_samples,
            classes,
            labels,
            dim,
            layers,
            arch,
            squeeze: squeeze && arch != Architecture::Extended,
            ladder,
            loss,
            learning_rate,
            beta1,
            beta2,
            epsilon,
            epochs,
            init_range,
            output_shift,
            readout,
            seeds,
            output,
        })
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Ok((ExperimentConfig::parse(&text, base)?, text))
    }
}
