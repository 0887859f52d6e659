//! Datasets: synthetic tasks, digits ingestion, PCA, splits, label
//! assignments and the k-nearest-neighbour baseline.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::qudit::validate_permutation;
use crate::rng::{stream, Purpose};
use crate::{Error, Result};

mod digits;
mod knn;
mod pca;

pub use digits::{choose_classes, filter_classes, parse_digits_csv, DIGIT_FEATURES, DIGIT_PIXEL_MAX};
pub use knn::knn_predict;
pub use pca::{pca_fit_transform, PcaModel};

#[derive(Clone, Debug, PartialEq)]
pub enum Targets {
    Classes(Vec<usize>),
    Values(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Classification,
    Regression,
}

/// `N` real input vectors of dimension `D` with one target each.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    inputs: Vec<f64>,
    input_dim: usize,
    targets: Targets,
}

impl LabeledDataset {
    /// `inputs` is row-major `N × input_dim`.
    pub fn new(inputs: Vec<f64>, input_dim: usize, targets: Targets) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidArgument("input dimension must be positive".into()));
        }
        let n = match &targets {
            Targets::Classes(t) => t.len(),
            Targets::Values(v) => v.len(),
        };
        if n == 0 {
            return Err(Error::EmptyBatch);
        }
        if inputs.len() != n * input_dim {
            return Err(Error::LengthMismatch { left: inputs.len(), right: n * input_dim });
        }
        if let Some(index) = inputs.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        if let Targets::Values(v) = &targets {
            if let Some(index) = v.iter().position(|t| !t.is_finite()) {
                return Err(Error::InvalidArgument(format!("target {index} is not finite")));
            }
        }
        Ok(LabeledDataset { inputs, input_dim, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.len() / self.input_dim
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.input_dim..(i + 1) * self.input_dim]
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn targets(&self) -> &Targets {
        &self.targets
    }

    pub fn task(&self) -> Task {
        match self.targets {
            Targets::Classes(_) => Task::Classification,
            Targets::Values(_) => Task::Regression,
        }
    }

    pub fn classes(&self) -> Option<&[usize]> {
        match &self.targets {
            Targets::Classes(t) => Some(t),
            Targets::Values(_) => None,
        }
    }

    pub fn values(&self) -> Option<&[f64]> {
        match &self.targets {
            Targets::Values(v) => Some(v),
            Targets::Classes(_) => None,
        }
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut inputs = Vec::with_capacity(indices.len() * self.input_dim);
        for &i in indices {
            inputs.extend_from_slice(self.input(i));
        }
        let targets = match &self.targets {
            Targets::Classes(t) => Targets::Classes(indices.iter().map(|&i| t[i]).collect()),
            Targets::Values(v) => Targets::Values(indices.iter().map(|&i| v[i]).collect()),
        };
        LabeledDataset::new(inputs, self.input_dim, targets)
    }

    pub(crate) fn with_inputs(&self, inputs: Vec<f64>, input_dim: usize) -> Result<Self> {
        LabeledDataset::new(inputs, input_dim, self.targets.clone())
    }
}

/// `f(x) = ½(cos 2x + cos 3.5x)`
pub fn two_frequency_target(x: f64) -> f64 {
    0.5 * ((2.0 * x).cos() + (3.5 * x).cos())
}

/// `n` evenly spaced points on `[-π, π]` (both ends included) labelled by
/// [`two_frequency_target`].
pub fn regression_grid(n: usize) -> Result<LabeledDataset> {
    if n < 2 {
        return Err(Error::InvalidArgument("regression grid needs at least two points".into()));
    }
    let pi = core::f64::consts::PI;
    let xs: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { pi } else { -pi + 2.0 * pi * i as f64 / (n - 1) as f64 })
        .collect();
    let ys = xs.iter().map(|&x| two_frequency_target(x)).collect();
    LabeledDataset::new(xs, 1, Targets::Values(ys))
}

fn uniform_square<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..2 * n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// Stripe index of a point: stripes are perpendicular to the direction at
/// `angle_deg` from the `x₂` axis, numbered from the low side. The
/// projection is divided by its maximum over the square so every stripe
/// intersects it.
pub fn stripe_label(point: [f64; 2], num_classes: usize, angle_deg: f64) -> usize {
    let a = num_traits::Euclid::rem_euclid(&angle_deg, &360.0).to_radians();
    let (s, c) = a.sin_cos();
    let projection = -s * point[0] + c * point[1];
    let t = projection / (s.abs() + c.abs());
    let raw = (num_classes as f64 * (t + 1.0) / 2.0).floor();
    (raw.max(0.0) as usize).min(num_classes - 1)
}

/// Uniform points on `[-1, 1]²` labelled by [`stripe_label`].
pub fn stripes<R: Rng + ?Sized>(n: usize, num_classes: usize, angle_deg: f64, rng: &mut R) -> Result<LabeledDataset> {
    if num_classes < 2 {
        return Err(Error::InvalidArgument("stripes need at least two classes".into()));
    }
    let inputs = uniform_square(n, rng);
    let labels = inputs.chunks(2).map(|p| stripe_label([p[0], p[1]], num_classes, angle_deg)).collect();
    LabeledDataset::new(inputs, 2, Targets::Classes(labels))
}

/// Ring index of a point around `center`, ring 0 innermost, with equal
/// widths reaching the farthest corner of the square.
pub fn ring_label(point: [f64; 2], num_classes: usize, center: [f64; 2]) -> usize {
    let r = (point[0] - center[0]).hypot(point[1] - center[1]);
    let r_max = [[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]]
        .iter()
        .map(|c: &[f64; 2]| (c[0] - center[0]).hypot(c[1] - center[1]))
        .fold(0.0, f64::max);
    ((num_classes as f64 * r / r_max).floor() as usize).min(num_classes - 1)
}

/// Default ring center, deliberately off the origin.
pub const DEFAULT_RING_CENTER: [f64; 2] = [0.2, -0.1];

/// Uniform points on `[-1, 1]²` labelled by [`ring_label`].
pub fn rings<R: Rng + ?Sized>(n: usize, num_classes: usize, center: [f64; 2], rng: &mut R) -> Result<LabeledDataset> {
    if num_classes < 2 {
        return Err(Error::InvalidArgument("rings need at least two classes".into()));
    }
    if center.iter().any(|c| !(-1.0..=1.0).contains(c)) {
        return Err(Error::InvalidArgument("ring center must lie in [-1, 1]²".into()));
    }
    let inputs = uniform_square(n, rng);
    let labels = inputs.chunks(2).map(|p| ring_label([p[0], p[1]], num_classes, center)).collect();
    LabeledDataset::new(inputs, 2, Targets::Classes(labels))
}

/// Disjoint random train and test subsets.
pub fn split<R: Rng + ?Sized>(
    dataset: &LabeledDataset,
    train_n: usize,
    test_n: usize,
    rng: &mut R,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if train_n == 0 || test_n == 0 {
        return Err(Error::InvalidArgument("train and test sets must both be non-empty".into()));
    }
    let available = dataset.len();
    if train_n + test_n > available {
        return Err(Error::InsufficientData { requested: train_n + test_n, available });
    }
    let mut idx: Vec<usize> = (0..available).collect();
    idx.shuffle(rng);
    Ok((dataset.subset(&idx[..train_n])?, dataset.subset(&idx[train_n..train_n + test_n])?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignmentMode {
    Aligned,
    Randomized { seed: u64 },
    /// Caller-supplied permutation.
    Explicit,
}

/// Bijection from class label to qudit basis index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelAssignment {
    permutation: Vec<usize>,
    mode: AssignmentMode,
}

impl LabelAssignment {
    pub fn aligned(d: usize) -> Self {
        LabelAssignment { permutation: (0..d).collect(), mode: AssignmentMode::Aligned }
    }

    /// Uniformly random permutation drawn from `seed`'s label stream.
    pub fn randomized(d: usize, seed: u64) -> Self {
        let mut permutation: Vec<usize> = (0..d).collect();
        permutation.shuffle(&mut stream(seed, Purpose::Labels));
        LabelAssignment { permutation, mode: AssignmentMode::Randomized { seed } }
    }

    pub fn from_permutation(permutation: Vec<usize>) -> Result<Self> {
        validate_permutation(&permutation, permutation.len())?;
        let identity = permutation.iter().enumerate().all(|(i, &p)| i == p);
        let mode = if identity { AssignmentMode::Aligned } else { AssignmentMode::Explicit };
        Ok(LabelAssignment { permutation, mode })
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn mode(&self) -> AssignmentMode {
        self.mode
    }

    pub fn map(&self, label: usize) -> usize {
        self.permutation[label]
    }

    pub fn inverse(&self) -> LabelAssignment {
        let mut inv = alloc::vec![0; self.permutation.len()];
        for (label, &basis) in self.permutation.iter().enumerate() {
            inv[basis] = label;
        }
        LabelAssignment { permutation: inv, mode: self.mode }
    }
}

/// Relabels class targets through the assignment.
pub fn apply_assignment(dataset: &LabeledDataset, assignment: &LabelAssignment) -> Result<LabeledDataset> {
    let classes = dataset
        .classes()
        .ok_or_else(|| Error::Unsupported("label assignment needs a classification dataset".into()))?;
    let d = assignment.permutation.len();
    let mut mapped = Vec::with_capacity(classes.len());
    for &y in classes {
        if y >= d {
            return Err(Error::LabelOutOfRange { label: y, classes: d });
        }
        mapped.push(assignment.map(y));
    }
    LabeledDataset::new(dataset.inputs.clone(), dataset.input_dim, Targets::Classes(mapped))
}
