use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::LabeledDataset;
use crate::{Error, Result};

/// k-nearest-neighbour classification of the row-major `queries` under the
/// Euclidean metric. Neighbour ties at equal distance go to the earlier
/// training row; vote ties go to the class with the smaller mean neighbour
/// distance, then to the lower label.
pub fn knn_predict(train: &LabeledDataset, queries: &[f64], k: usize) -> Result<Vec<usize>> {
    let labels = train
        .classes()
        .ok_or_else(|| Error::Unsupported("k-nearest neighbours needs a classification dataset".into()))?;
    if k == 0 || k > train.len() {
        return Err(Error::InvalidArgument(alloc::format!("k must lie in 1..={}", train.len())));
    }
    let dim = train.input_dim();
    if queries.len() % dim != 0 {
        return Err(Error::DimensionMismatch { expected: dim, found: queries.len() % dim });
    }
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(train.len());
    let mut votes = vec![0usize; classes];
    let mut dist_sum = vec![0.0; classes];
    let mut out = Vec::with_capacity(queries.len() / dim);
    for q in queries.chunks(dim) {
        dist.clear();
        dist.extend((0..train.len()).map(|i| {
            let d2: f64 = train.input(i).iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2.sqrt(), i)
        }));
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < dist.len() {
            dist.select_nth_unstable_by(k - 1, cmp);
        }
        votes.iter_mut().for_each(|v| *v = 0);
        dist_sum.iter_mut().for_each(|s| *s = 0.0);
        for &(d, i) in &dist[..k] {
            votes[labels[i]] += 1;
            dist_sum[labels[i]] += d;
        }
        let mean = |c: usize| dist_sum[c] / votes[c] as f64;
        let best = (0..classes)
            .filter(|&c| votes[c] > 0)
            .min_by(|&a, &b| votes[b].cmp(&votes[a]).then(mean(a).total_cmp(&mean(b))).then(a.cmp(&b)))
            .expect("k >= 1 casts at least one vote");
        out.push(best);
    }
    Ok(out)
}
