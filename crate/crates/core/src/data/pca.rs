use alloc::vec;
use alloc::vec::Vec;

use super::LabeledDataset;
use crate::linalg::symmetric_eigen_desc;
use crate::{Error, Result};

/// Fitted principal-component projection followed by a per-column affine
/// map onto `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `out_dim` unit vectors, each of length `in_dim`.
    pub components: Vec<Vec<f64>>,
    /// Covariance eigenvalues of the kept components, descending.
    pub explained_variance: Vec<f64>,
    /// Trace of the training covariance.
    pub total_variance: f64,
    pub column_min: Vec<f64>,
    pub column_max: Vec<f64>,
}

impl PcaModel {
    pub fn in_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn out_dim(&self) -> usize {
        self.components.len()
    }

    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        self.explained_variance.iter().map(|v| v / self.total_variance).collect()
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.iter().zip(x).zip(&self.mean).map(|((w, xi), mu)| w * (xi - mu)).sum())
            .collect()
    }

    fn rescale(&self, z: &mut [f64]) {
        for (j, v) in z.iter_mut().enumerate() {
            let (lo, hi) = (self.column_min[j], self.column_max[j]);
            *v = if hi > lo { 2.0 * (*v - lo) / (hi - lo) - 1.0 } else { 0.0 };
        }
    }

    /// Projects and rescales with the stored training statistics; values of
    /// unseen data may fall outside `[-1, 1]`.
    pub fn transform(&self, dataset: &LabeledDataset) -> Result<LabeledDataset> {
        if dataset.input_dim() != self.in_dim() {
            return Err(Error::DimensionMismatch { expected: self.in_dim(), found: dataset.input_dim() });
        }
        let mut out = Vec::with_capacity(dataset.len() * self.out_dim());
        for i in 0..dataset.len() {
            let mut z = self.project(dataset.input(i));
            self.rescale(&mut z);
            out.extend(z);
        }
        dataset.with_inputs(out, self.out_dim())
    }
}

/// Fits PCA on `dataset` and returns it reduced to `out_dim` columns.
pub fn pca_fit_transform(dataset: &LabeledDataset, out_dim: usize) -> Result<(LabeledDataset, PcaModel)> {
    let n = dataset.len();
    let dim = dataset.input_dim();
    if n < 2 {
        return Err(Error::InsufficientData { requested: 2, available: n });
    }
    if out_dim == 0 || out_dim > n.min(dim) {
        return Err(Error::InvalidArgument(alloc::format!(
            "output dimension {out_dim} must lie in 1..={}",
            n.min(dim)
        )));
    }

    let mut mean = vec![0.0; dim];
    for i in 0..n {
        for (m, x) in mean.iter_mut().zip(dataset.input(i)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = vec![0.0; dim * dim];
    let mut centered = vec![0.0; dim];
    for i in 0..n {
        for ((c, x), m) in centered.iter_mut().zip(dataset.input(i)).zip(&mean) {
            *c = x - m;
        }
        for r in 0..dim {
            let cr = centered[r];
            if cr == 0.0 {
                continue;
            }
            for c in r..dim {
                cov[r * dim + c] += cr * centered[c];
            }
        }
    }
    let denom = (n - 1) as f64;
    for r in 0..dim {
        for c in r..dim {
            let v = cov[r * dim + c] / denom;
            cov[r * dim + c] = v;
            cov[c * dim + r] = v;
        }
    }
    let total_variance: f64 = (0..dim).map(|r| cov[r * dim + r]).sum();

    let (values, vectors) = symmetric_eigen_desc(dim, &cov);
    let scale = values.first().copied().unwrap_or(0.0).max(0.0);
    let tol = scale * dim as f64 * 1e-12;
    let rank = values.iter().filter(|&&v| v > tol).count();
    if out_dim > rank {
        return Err(Error::RankDeficient { rank, requested: out_dim });
    }

    let components: Vec<Vec<f64>> = (0..out_dim)
        .map(|p| {
            let mut v = vectors[p * dim..(p + 1) * dim].to_vec();
            // Sign convention: the largest-magnitude entry is positive, first one on ties.
            let pivot = v.iter().enumerate().fold(0, |best, (i, x)| if x.abs() > v[best].abs() { i } else { best });
            if v[pivot] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();

    let mut model = PcaModel {
        mean,
        components,
        explained_variance: values[..out_dim].to_vec(),
        total_variance,
        column_min: vec![f64::INFINITY; out_dim],
        column_max: vec![f64::NEG_INFINITY; out_dim],
    };
    let mut projected = Vec::with_capacity(n * out_dim);
    for i in 0..n {
        let z = model.project(dataset.input(i));
        for (j, v) in z.iter().enumerate() {
            model.column_min[j] = model.column_min[j].min(*v);
            model.column_max[j] = model.column_max[j].max(*v);
        }
        projected.extend(z);
    }
    for row in projected.chunks_mut(out_dim) {
        model.rescale(row);
    }
    Ok((dataset.with_inputs(projected, out_dim)?, model))
}
