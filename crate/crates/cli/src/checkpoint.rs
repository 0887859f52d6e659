//! JSON checkpoints of trained models.

use std::path::Path;

use reupload_core::circuit::{Architecture, CircuitSpec, EncodingLadder, ParameterVector};
use reupload_core::learn::{Readout, RunRecord};
use reupload_core::qubitmap::qubit_label_states;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecJson {
    pub dim: usize,
    pub input_dim: usize,
    pub layers: usize,
    pub arch: String,
    pub squeeze: bool,
    /// Basis permutation of a randomized encoding ladder.
    pub ladder: Option<Vec<usize>>,
}

impl SpecJson {
    pub fn from_spec(spec: &CircuitSpec) -> Self {
        SpecJson {
            dim: spec.dim,
            input_dim: spec.input_dim,
            layers: spec.layers,
            arch: spec.arch.name().to_string(),
            squeeze: spec.squeeze,
            ladder: match &spec.ladder {
                EncodingLadder::Standard => None,
                EncodingLadder::Randomized(p) => Some(p.clone()),
            },
        }
    }

    pub fn to_spec(&self) -> Result<CircuitSpec> {
        let arch: Architecture = self.arch.parse()?;
        let ladder = match &self.ladder {
            None => EncodingLadder::Standard,
            Some(p) => EncodingLadder::Randomized(p.clone()),
        };
        let spec = CircuitSpec {
            dim: self.dim,
            input_dim: self.input_dim,
            layers: self.layers,
            arch,
            squeeze: self.squeeze,
            ladder,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsJson {
    pub final_train_loss: f64,
    pub train_metric: f64,
    pub test_metric: Option<f64>,
    pub best_epoch: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub artifact_version: u32,
    pub task: String,
    pub spec: SpecJson,
    /// `"basis"` or `"qubit-labels"`.
    pub readout: String,
    /// Class label → basis index; class `c` is read from basis state `label_permutation[c]`.
    pub label_permutation: Vec<usize>,
    /// Number of class labels; 0 for regression.
    pub classes: usize,
    pub output_shift: f64,
    pub seed: u64,
    /// Parameters as decimal strings with 17 significant digits.
    pub params: Vec<String>,
    pub metrics: MetricsJson,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_param(v: f64) -> String {
    format!("{v:.16e}")
}

impl Checkpoint {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        task: &str,
        spec: &CircuitSpec,
        readout: &str,
        label_permutation: Vec<usize>,
        classes: usize,
        output_shift: f64,
        record: &RunRecord,
    ) -> Self {
        Checkpoint {
            artifact_version: ARTIFACT_VERSION,
            task: task.to_string(),
            spec: SpecJson::from_spec(spec),
            readout: readout.to_string(),
            label_permutation,
            classes,
            output_shift,
            seed: record.seed,
            params: record.params.as_slice().iter().map(|&v| format_param(v)).collect(),
            metrics: MetricsJson {
                final_train_loss: record.final_train_loss,
                train_metric: record.train_metric,
                test_metric: record.test_metric,
                best_epoch: record.best_epoch,
            },
        }
    }

    pub fn params(&self) -> Result<ParameterVector> {
        self.params
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| CliError::Failed(format!("bad parameter `{s}` in checkpoint"))))
            .collect::<Result<Vec<_>>>()
            .map(ParameterVector)
    }

    pub fn readout(&self) -> Result<Readout> {
        match self.readout.as_str() {
            "basis" => Ok(Readout::Basis),
            "qubit-labels" => Ok(Readout::LabelStates(qubit_label_states(self.classes)?)),
            other => Err(CliError::Failed(format!("unknown readout `{other}` in checkpoint"))),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("checkpoint serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let cp: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| CliError::Failed(format!("{}: invalid checkpoint: {e}", path.display())))?;
        if cp.artifact_version != ARTIFACT_VERSION {
            return Err(CliError::Failed(format!(
                "{}: artifact version {} is not supported",
                path.display(),
                cp.artifact_version
            )));
        }
        Ok(cp)
    }
}
