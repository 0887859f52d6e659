//! Executes an experiment and writes its artifacts.
//!
//! Output directory layout:
//!
//! * `runs.csv`: one row per (setting, seed), see [`RUNS_HEADER`].
//! * `summary.csv`: box statistics per setting, see [`SUMMARY_HEADER`].
//! * `checkpoints/layers-<L>-seed-<s>.json`: trained parameters.
//! * `manifest.json`: artifact version, tool version and config hash.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::checkpoint::{Checkpoint, ARTIFACT_VERSION};
use crate::config::{ExperimentConfig, LabelMode, LadderMode, ReadoutMode};
use crate::error::{CliError, Result};
use crate::experiment::{summarize, Experiment, SeedRun};

pub const OUTPUT_DIR_ENV: &str = "REUPLOAD_OUTPUT_DIR";
pub const THREADS_ENV: &str = "REUPLOAD_THREADS";

pub const RUNS_HEADER: &str = "task,arch,dim,layers,squeeze,ladder,labels,param_count,seed,status,\
final_train_loss,train_metric,test_metric,best_epoch,checkpoint,error";
pub const SUMMARY_HEADER: &str =
    "task,arch,dim,layers,squeeze,ladder,labels,param_count,metric,runs,failures,min,p25,median,p75,max";

/// Writes `bytes` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn metric_name(config: &ExperimentConfig) -> &'static str {
    if config.task.is_classification() {
        "test_accuracy"
    } else {
        "train_mse"
    }
}

fn setting_columns(config: &ExperimentConfig, layers: usize, param_count: usize) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        config.task.name(),
        config.arch.name(),
        config.dim,
        layers,
        config.squeeze,
        match config.ladder {
            LadderMode::Standard => "standard",
            LadderMode::Randomized => "randomized",
        },
        match config.labels {
            LabelMode::Aligned => "aligned",
            LabelMode::Randomized => "randomized",
        },
        param_count,
    )
}

/// Shortest round-trip form, switching to exponent notation for tiny values.
fn num(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn checkpoint_name(layers: usize, seed: u64) -> String {
    format!("layers-{layers}-seed-{seed}.json")
}

pub fn checkpoint_for(config: &ExperimentConfig, run: &SeedRun) -> Option<Checkpoint> {
    let record = run.outcome.as_ref().ok()?;
    let readout = match config.readout {
        ReadoutMode::Basis => "basis",
        ReadoutMode::QubitLabels => "qubit-labels",
    };
    let classes = if config.task.is_classification() { config.classes } else { 0 };
    Some(Checkpoint::new(config.task.name(), &run.spec, readout, run.assignment.clone(), classes, config.output_shift, record))
}

pub fn runs_csv(config: &ExperimentConfig, runs: &[SeedRun]) -> String {
    let mut out = String::from(RUNS_HEADER);
    out.push('\n');
    for run in runs {
        let layers = config.layers[run.setting];
        let _ = write!(out, "{},{},", setting_columns(config, layers, run.spec.param_count()), run.seed);
        match &run.outcome {
            Ok(r) => {
                let test = r.test_metric.map(num).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "ok,{},{},{},{},checkpoints/{},",
                    num(r.final_train_loss),
                    num(r.train_metric),
                    test,
                    r.best_epoch,
                    checkpoint_name(layers, run.seed)
                );
            }
            Err(e) => {
                let _ = writeln!(out, "failed,,,,,,{}", csv_field(e));
            }
        }
    }
    out
}

pub fn summary_csv(config: &ExperimentConfig, runs: &[SeedRun]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for (s, summary) in summarize(config, runs).into_iter().enumerate() {
        let layers = config.layers[s];
        let in_setting: Vec<&SeedRun> = runs.iter().filter(|r| r.setting == s).collect();
        let failures = in_setting.iter().filter(|r| r.outcome.is_err()).count();
        let param_count = in_setting.first().map_or(0, |r| r.spec.param_count());
        let stats = match summary {
            Some(v) => [v.min, v.p25, v.median, v.p75, v.max].map(num).join(","),
            None => ",,,,".to_string(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            setting_columns(config, layers, param_count),
            metric_name(config),
            in_setting.len() - failures,
            failures,
            stats
        );
    }
    out
}

#[derive(Serialize)]
struct Manifest<'a> {
    artifact_version: u32,
    tool_version: &'a str,
    config_sha256: String,
    settings: Vec<usize>,
    seeds: &'a [u64],
    failed_runs: usize,
}

pub fn config_hash(config_text: &str) -> String {
    hex::encode(Sha256::digest(config_text.as_bytes()))
}

/// What a finished `run` produced.
#[derive(Debug)]
pub struct RunReport {
    pub output: PathBuf,
    pub runs: Vec<SeedRun>,
}

impl RunReport {
    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.outcome.is_err()).count()
    }
}

/// Thread count from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::config(None, Some(THREADS_ENV), format!("expected a positive integer, found `{v}`"))),
        },
    }
}

/// Trains every (setting, seed) pair and writes all artifacts.
pub fn execute(config: &ExperimentConfig, config_text: &str, threads: Option<usize>) -> Result<RunReport> {
    let experiment = Experiment::new(config.clone())?;
    let out = config.output.clone();
    let ckpt_dir = out.join("checkpoints");
    fs::create_dir_all(&ckpt_dir).map_err(|e| CliError::io(&ckpt_dir, e))?;

    let jobs: Vec<(usize, u64)> = (0..config.layers.len())
        .flat_map(|s| config.seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let work = || -> Result<Vec<SeedRun>> {
        jobs.par_iter()
            .map(|&(s, seed)| {
                let run = experiment.run_one(s, seed)?;
                if let Some(cp) = checkpoint_for(config, &run) {
                    write_atomic(&ckpt_dir.join(checkpoint_name(config.layers[s], seed)), cp.to_json().as_bytes())?;
                }
                Ok(run)
            })
            .collect()
    };
    let runs = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Failed(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    write_atomic(&out.join("runs.csv"), runs_csv(config, &runs).as_bytes())?;
    write_atomic(&out.join("summary.csv"), summary_csv(config, &runs).as_bytes())?;
    let manifest = Manifest {
        artifact_version: ARTIFACT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        config_sha256: config_hash(config_text),
        settings: config.layers.clone(),
        seeds: &config.seeds,
        failed_runs: runs.iter().filter(|r| r.outcome.is_err()).count(),
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write_atomic(&out.join("manifest.json"), json.as_bytes())?;
    Ok(RunReport { output: out, runs })
}
