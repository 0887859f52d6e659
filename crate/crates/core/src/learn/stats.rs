use alloc::vec::Vec;

use crate::circuit::CircuitSpec;
use crate::data::LabeledDataset;
use crate::learn::{train, RunRecord, TrainConfig};
use crate::{Error, Result};

/// Percentile `q ∈ [0, 1]` of ascending `sorted`, linearly interpolating
/// between order statistics at rank `q (n - 1)`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let rank = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = rank as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = rank - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Box statistics of a metric over runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub max: f64,
}

impl Summary {
    pub fn from_values(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Summary {
            count: v.len(),
            min: v[0],
            p25: percentile(&v, 0.25),
            median: percentile(&v, 0.5),
            p75: percentile(&v, 0.75),
            max: v[v.len() - 1],
        })
    }

    /// Whether the interquartile ranges `[p25, p75]` intersect.
    pub fn iqr_overlaps(&self, other: &Summary) -> bool {
        self.p25 <= other.p75 && other.p25 <= self.p75
    }
}

/// All runs of one circuit setting.
#[derive(Clone, Debug)]
pub struct SweepSetting {
    pub spec: CircuitSpec,
    pub records: Vec<RunRecord>,
    pub failures: Vec<(u64, Error)>,
    /// Over the test metric when present, the train metric otherwise.
    pub summary: Option<Summary>,
}

impl SweepSetting {
    pub fn new(spec: CircuitSpec, records: Vec<RunRecord>, failures: Vec<(u64, Error)>) -> Self {
        let metrics: Vec<f64> = records.iter().map(|r| r.test_metric.unwrap_or(r.train_metric)).collect();
        let summary = Summary::from_values(&metrics);
        SweepSetting { spec, records, failures, summary }
    }
}

/// Trains every spec for every seed, sequentially.
///
/// `make_data(seed)` returns the train and optional test sets for a run, so
/// each seed gets a freshly sampled dataset and a fresh initialization.
/// A failing run is recorded and does not stop the others.
pub fn sweep<F>(specs: &[CircuitSpec], seeds: &[u64], make_data: F, config: &TrainConfig) -> Result<Vec<SweepSetting>>
where
    F: Fn(u64) -> Result<(LabeledDataset, Option<LabeledDataset>)>,
{
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("a sweep needs at least one seed".into()));
    }
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let mut records = Vec::new();
        let mut failures = Vec::new();
        for &seed in seeds {
            let cfg = TrainConfig { seed, ..config.clone() };
            let run = make_data(seed).and_then(|(tr, te)| train(spec, &tr, te.as_ref(), &cfg));
            match run {
                Ok(r) => records.push(r),
                Err(e) => failures.push((seed, e)),
            }
        }
        out.push(SweepSetting::new(spec.clone(), records, failures));
    }
    Ok(out)
}
