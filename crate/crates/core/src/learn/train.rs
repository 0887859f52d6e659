use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::circuit::{BoundCircuit, Circuit, CircuitSpec, ParameterVector};
use crate::data::{LabeledDataset, Targets};
use crate::learn::{accuracy, predict_class, Adam};
use crate::linalg::{C64, ZERO};
use crate::qubitmap::QubitLabelSet;
use crate::rng::{stream, Purpose};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loss {
    /// Mean squared error of the expected label.
    Mse,
    /// `Σ_i (1 - p(y_i|x_i))`.
    Overlap,
}

impl core::str::FromStr for Loss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mse" => Ok(Loss::Mse),
            "overlap" => Ok(Loss::Overlap),
            other => Err(Error::InvalidArgument(format!("unknown loss `{other}`"))),
        }
    }
}

/// How class scores are read off the output state.
#[derive(Clone, Debug, PartialEq)]
pub enum Readout {
    /// `|⟨y|ψ⟩|²` over the computational basis.
    Basis,
    /// `|⟨label_y|ψ⟩|²` over (possibly non-orthogonal) label states.
    LabelStates(QubitLabelSet),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub loss: Loss,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub seed: u64,
    pub init_range: (f64, f64),
    pub readout: Readout,
    /// Added to the expected label for regression outputs.
    pub output_shift: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            loss: Loss::Overlap,
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 2000,
            seed: 0,
            init_range: (-core::f64::consts::PI, core::f64::consts::PI),
            readout: Readout::Basis,
            output_shift: 0.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if self.epochs < 1 {
            return bad("epochs must be at least 1");
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        if !(self.init_range.0 < self.init_range.1) {
            return bad("init range must satisfy low < high");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || !(self.epsilon > 0.0) {
            return bad("ADAM needs 0 <= beta < 1 and epsilon > 0");
        }
        if self.loss == Loss::Mse && matches!(self.readout, Readout::LabelStates(_)) {
            return bad("mse is undefined for non-orthogonal label states");
        }
        Ok(())
    }
}

/// Outcome of one training run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    /// Training loss of the returned parameters.
    pub final_train_loss: f64,
    /// Accuracy (classification) or MSE (regression).
    pub train_metric: f64,
    pub test_metric: Option<f64>,
    pub params: ParameterVector,
    /// Loss after each ADAM step.
    pub loss_trace: Vec<f64>,
    /// 1-based step whose parameters were returned.
    pub best_epoch: usize,
}

/// Batch objective: the circuit, the data and how outputs are scored.
struct Objective<'a> {
    circuit: &'a Circuit,
    data: &'a LabeledDataset,
    config: &'a TrainConfig,
}

impl Objective<'_> {
    fn check(&self) -> Result<()> {
        let spec = self.circuit.spec();
        if self.data.input_dim() != spec.input_dim {
            return Err(Error::DimensionMismatch { expected: spec.input_dim, found: self.data.input_dim() });
        }
        let classes = readout_width(spec, &self.config.readout)?;
        match self.data.targets() {
            Targets::Classes(t) => {
                if let Some(&label) = t.iter().find(|&&y| y >= classes) {
                    return Err(Error::LabelOutOfRange { label, classes });
                }
            }
            Targets::Values(_) if self.config.loss == Loss::Overlap => {
                return Err(Error::InvalidArgument("overlap loss needs class labels".into()));
            }
            Targets::Values(_) => {}
        }
        Ok(())
    }

    /// Loss over the batch, and its gradient when `grad` is given.
    fn evaluate(&self, params: &[f64], mut grad: Option<&mut [f64]>) -> Result<f64> {
        let bound = self.circuit.bind(params)?;
        let mut tape = bound.tape();
        if let Some(g) = grad.as_deref_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        let n = self.data.len();
        let mut total = 0.0;
        let mut scores = Vec::new();
        let mut dscores = Vec::new();
        let mut cost = Vec::new();
        for i in 0..n {
            let x = self.data.input(i);
            bound.record(x, &mut tape)?;
            let psi = tape.output();
            readout_scores(&self.config.readout, psi, &mut scores);
            dscores.clear();
            dscores.resize(scores.len(), 0.0);
            total += match (self.config.loss, self.data.targets()) {
                (Loss::Overlap, Targets::Classes(t)) => {
                    dscores[t[i]] = -1.0;
                    1.0 - scores[t[i]]
                }
                (Loss::Mse, targets) => {
                    let target = match targets {
                        Targets::Classes(t) => t[i] as f64,
                        Targets::Values(v) => v[i],
                    };
                    let shift = if matches!(targets, Targets::Values(_)) { self.config.output_shift } else { 0.0 };
                    let err = super::expected_label(&scores) + shift - target;
                    for (y, ds) in dscores.iter_mut().enumerate() {
                        *ds = 2.0 * err * y as f64 / n as f64;
                    }
                    err * err / n as f64
                }
                (Loss::Overlap, Targets::Values(_)) => unreachable!("rejected by check"),
            };
            if let Some(g) = grad.as_deref_mut() {
                readout_cost_gradient(&self.config.readout, psi, &dscores, &mut cost);
                bound.backward(x, &tape, &cost, g)?;
            }
        }
        Ok(total)
    }
}

fn readout_width(spec: &CircuitSpec, readout: &Readout) -> Result<usize> {
    match readout {
        Readout::Basis => Ok(spec.dim),
        Readout::LabelStates(labels) => {
            if spec.dim != 2 {
                return Err(Error::Unsupported(format!("label-state readout needs a qubit circuit, got d = {}", spec.dim)));
            }
            Ok(labels.len())
        }
    }
}

fn readout_scores(readout: &Readout, psi: &[C64], out: &mut Vec<f64>) {
    out.clear();
    match readout {
        Readout::Basis => out.extend(psi.iter().map(|a| a.norm_sqr())),
        Readout::LabelStates(labels) => out.extend(labels.overlaps_raw(psi)),
    }
}

/// `g = Σ_y 2 (∂L/∂s_y) ⟨l_y|ψ⟩ |l_y⟩`, which for basis labels is `2 (∂L/∂p_y) ψ_y`.
fn readout_cost_gradient(readout: &Readout, psi: &[C64], dscores: &[f64], out: &mut Vec<C64>) {
    out.clear();
    out.resize(psi.len(), ZERO);
    match readout {
        Readout::Basis => {
            for ((o, &a), &ds) in out.iter_mut().zip(psi).zip(dscores) {
                *o = a * (2.0 * ds);
            }
        }
        Readout::LabelStates(labels) => {
            for (label, &ds) in labels.states().iter().zip(dscores) {
                if ds == 0.0 {
                    continue;
                }
                let amp = label[0].conj() * psi[0] + label[1].conj() * psi[1];
                for (o, &l) in out.iter_mut().zip(label) {
                    *o += l * amp * (2.0 * ds);
                }
            }
        }
    }
}

/// Training loss at `params` and its gradient, as seen by the optimizer.
pub fn loss_and_gradient(
    circuit: &Circuit,
    params: &[f64],
    data: &LabeledDataset,
    config: &TrainConfig,
) -> Result<(f64, Vec<f64>)> {
    let objective = Objective { circuit, data, config };
    objective.check()?;
    let mut grad = vec![0.0; params.len()];
    let loss = objective.evaluate(params, Some(&mut grad))?;
    Ok((loss, grad))
}

/// Accuracy for class targets, MSE of the shifted expected label otherwise.
pub fn evaluate(bound: &BoundCircuit<'_>, data: &LabeledDataset, config: &TrainConfig) -> Result<f64> {
    let mut tape = bound.tape();
    let mut scores = Vec::new();
    match data.targets() {
        Targets::Classes(t) => {
            let mut predictions = Vec::with_capacity(data.len());
            for i in 0..data.len() {
                bound.record(data.input(i), &mut tape)?;
                readout_scores(&config.readout, tape.output(), &mut scores);
                predictions.push(predict_class(&scores));
            }
            accuracy(&predictions, t)
        }
        Targets::Values(v) => {
            if matches!(config.readout, Readout::LabelStates(_)) {
                return Err(Error::Unsupported("regression with label-state readout".into()));
            }
            let mut outputs = Vec::with_capacity(data.len());
            for i in 0..data.len() {
                bound.record(data.input(i), &mut tape)?;
                readout_scores(&config.readout, tape.output(), &mut scores);
                outputs.push(super::predict_regression(&scores, config.output_shift));
            }
            super::mse_loss(&outputs, v)
        }
    }
}

/// Full-batch ADAM from a random start drawn from `config.seed`.
///
/// Returns the parameters with the lowest training loss seen after any
/// step, with metrics evaluated at those parameters.
pub fn train(
    spec: &CircuitSpec,
    train_set: &LabeledDataset,
    test_set: Option<&LabeledDataset>,
    config: &TrainConfig,
) -> Result<RunRecord> {
    config.validate()?;
    let circuit = Circuit::new(spec.clone())?;
    let objective = Objective { circuit: &circuit, data: train_set, config };
    objective.check()?;
    if let Some(test) = test_set {
        Objective { circuit: &circuit, data: test, config }.check()?;
    }

    let n = spec.param_count();
    let mut init_rng = stream(config.seed, Purpose::Init);
    let (lo, hi) = config.init_range;
    let mut params: Vec<f64> = (0..n).map(|_| init_rng.random_range(lo..hi)).collect();
    let mut adam = Adam::new(n, config.learning_rate, config.beta1, config.beta2, config.epsilon);
    let mut grad = vec![0.0; n];

    let loss0 = objective.evaluate(&params, Some(&mut grad))?;
    if !loss0.is_finite() {
        return Err(Error::NonFiniteLoss { epoch: 0 });
    }
    let mut trace = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for epoch in 1..=config.epochs {
        adam.step(&mut params, &grad);
        // The gradient after the final step is never used.
        let want_grad = epoch < config.epochs;
        let loss = objective.evaluate(&params, want_grad.then_some(&mut grad[..]))?;
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteLoss { epoch });
        }
        trace.push(loss);
        if best.as_ref().map_or(true, |(b, _, _)| loss < *b) {
            best = Some((loss, epoch, params.clone()));
        }
    }
    let (final_train_loss, best_epoch, best_params) = best.expect("epochs >= 1");

    let bound = circuit.bind(&best_params)?;
    let train_metric = evaluate(&bound, train_set, config)?;
    let test_metric = test_set.map(|t| evaluate(&bound, t, config)).transpose()?;
    Ok(RunRecord {
        seed: config.seed,
        final_train_loss,
        train_metric,
        test_metric,
        params: ParameterVector(best_params),
        loss_trace: trace,
        best_epoch,
    })
}
