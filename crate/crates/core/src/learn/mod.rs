//! Losses, predictions, metrics and shot sampling; ADAM training and
//! multi-seed statistics live in the submodules.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::qudit::QuditState;
use crate::{Error, Result};

mod adam;
mod stats;
mod train;

pub use adam::Adam;
pub use stats::{percentile, sweep, Summary, SweepSetting};
pub use train::{evaluate, loss_and_gradient, train, Loss, Readout, RunRecord, TrainConfig};

/// `p_y = |⟨y|ψ⟩|²` for every basis state.
pub fn class_probabilities(state: &QuditState) -> Vec<f64> {
    state.amplitudes().iter().map(|a| a.norm_sqr()).collect()
}

/// `⟨ȳ⟩ = Σ_y y p_y`
pub fn expected_label(probs: &[f64]) -> f64 {
    probs.iter().enumerate().map(|(y, p)| y as f64 * p).sum()
}

/// `(1/N) Σ (⟨ȳ_i⟩ - y_i)²`
pub fn mse_loss(outputs: &[f64], targets: &[f64]) -> Result<f64> {
    if outputs.len() != targets.len() {
        return Err(Error::LengthMismatch { left: outputs.len(), right: targets.len() });
    }
    if outputs.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let sum: f64 = outputs.iter().zip(targets).map(|(o, t)| (o - t) * (o - t)).sum();
    Ok(sum / outputs.len() as f64)
}

/// `Σ_i (1 - p(y_i|x_i))`, summed over the batch.
pub fn overlap_loss(true_label_probs: &[f64]) -> Result<f64> {
    if true_label_probs.is_empty() {
        return Err(Error::EmptyBatch);
    }
    Ok(true_label_probs.iter().map(|p| 1.0 - p).sum())
}

/// Index of the largest entry; ties go to the lowest index.
pub fn predict_class(probs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate().skip(1) {
        if p > probs[best] {
            best = i;
        }
    }
    best
}

/// Fraction of positions where `predictions` and `labels` agree.
pub fn accuracy(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch { left: predictions.len(), right: labels.len() });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let hits = predictions.iter().zip(labels).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Expected label shifted onto the target range.
pub fn predict_regression(probs: &[f64], shift: f64) -> f64 {
    expected_label(probs) + shift
}

/// Empirical outcome frequencies from `n_shots` draws of `probs`.
pub fn sample_shots<R: Rng + ?Sized>(probs: &[f64], n_shots: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    if probs.is_empty() || probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::InvalidArgument("probabilities must be finite and non-negative".into()));
    }
    let total: f64 = probs.iter().sum();
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p / total;
        cumulative.push(acc);
    }
    // Outcomes with zero probability must never be drawn, so the fallback
    // for u beyond the rounded total is the last outcome with mass.
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut counts = vec![0usize; probs.len()];
    for _ in 0..n_shots {
        let u: f64 = rng.random();
        let k = cumulative.iter().position(|&c| u < c).unwrap_or(last);
        counts[k] += 1;
    }
    Ok(counts.into_iter().map(|c| c as f64 / n_shots as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::rng::{stream, Purpose};
    use core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn probabilities_examples() {
        assert_eq!(class_probabilities(&QuditState::basis(3, 0).unwrap()), vec![1.0, 0.0, 0.0]);
        let s = QuditState::from_amplitudes(vec![
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(0.0, 0.0),
        ])
        .unwrap();
        let p = class_probabilities(&s);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15 && p[2] == 0.0);
    }

    #[test]
    fn expected_label_examples() {
        assert_eq!(expected_label(&[1.0, 0.0, 0.0]), 0.0);
        assert_eq!(expected_label(&[0.0, 0.0, 1.0]), 2.0);
        assert_eq!(expected_label(&[0.5, 0.0, 0.5]), 1.0);
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse_loss(&[0.3, 1.0], &[0.3, 1.0]).unwrap(), 0.0);
        assert_eq!(mse_loss(&[1.0], &[0.0]).unwrap(), 1.0);
        assert_eq!(mse_loss(&[0.5, 1.5], &[0.0, 2.0]).unwrap(), 0.25);
        assert_eq!(mse_loss(&[], &[]).unwrap_err(), Error::EmptyBatch);
        assert!(mse_loss(&[1.0], &[]).is_err());
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap_loss(&[1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(overlap_loss(&[0.25, 0.75]).unwrap(), 1.0);
        assert!(overlap_loss(&[]).is_err());
    }

    #[test]
    fn predict_class_examples() {
        assert_eq!(predict_class(&[0.1, 0.7, 0.2]), 1);
        assert_eq!(predict_class(&[0.5, 0.5]), 0);
        let p = [0.05, 0.3, 0.3, 0.35];
        let doubled: Vec<f64> = p.iter().map(|v| v * 2.0).collect();
        assert_eq!(predict_class(&p), predict_class(&doubled));
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 2, 0], &[0, 1, 2]).unwrap(), 0.0);
        assert_eq!(accuracy(&[0, 1, 2, 3], &[0, 1, 0, 0]).unwrap(), 0.5);
        assert!(accuracy(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn regression_examples() {
        assert_eq!(predict_regression(&[1.0, 0.0, 0.0], -1.0), -1.0);
        assert_eq!(predict_regression(&[0.0, 1.0, 0.0], -1.0), 0.0);
        assert_eq!(predict_regression(&[0.25, 0.5, 0.25], -1.0), 0.0);
    }

    #[test]
    fn shots_deterministic_and_degenerate() {
        let mut rng = stream(3, Purpose::Shots);
        assert_eq!(sample_shots(&[1.0, 0.0, 0.0], 77, &mut rng).unwrap(), vec![1.0, 0.0, 0.0]);
        let a = sample_shots(&[0.2, 0.3, 0.5], 512, &mut stream(5, Purpose::Shots)).unwrap();
        let b = sample_shots(&[0.2, 0.3, 0.5], 512, &mut stream(5, Purpose::Shots)).unwrap();
        assert_eq!(a, b);
        assert!(sample_shots(&[1.0], 0, &mut rng).is_err());
    }

    #[test]
    fn shots_uniform_within_five_sigma() {
        let mut rng = stream(11, Purpose::Shots);
        let f = sample_shots(&[0.25; 4], 512, &mut rng).unwrap();
        let sigma = (0.25f64 * 0.75 / 512.0).sqrt();
        assert!(f.iter().all(|v| (v - 0.25).abs() <= 5.0 * sigma), "{f:?}");
    }

    #[test]
    fn shots_converge() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let f = sample_shots(&p, 1_000_000, &mut stream(1, Purpose::Shots)).unwrap();
        let dev = f.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 5e-3, "{dev}");
    }
}
