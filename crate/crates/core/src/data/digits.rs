use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::Rng;

use super::{LabeledDataset, Targets};
use crate::{Error, Result};

pub const DIGIT_FEATURES: usize = 64;
pub const DIGIT_PIXEL_MAX: u8 = 16;
const DIGIT_CLASSES: usize = 10;

/// Parses the 8×8 digits CSV: one image per line, 64 pixel intensities in
/// `0..=16` followed by the label, no header. Blank lines are skipped.
pub fn parse_digits_csv(text: &str) -> Result<LabeledDataset> {
    let mut inputs = Vec::new();
    let mut labels = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        let err = |message: alloc::string::String| Error::Parse { line, message };
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != DIGIT_FEATURES + 1 {
            return Err(err(format!("expected {} fields, found {}", DIGIT_FEATURES + 1, fields.len())));
        }
        for (col, field) in fields[..DIGIT_FEATURES].iter().enumerate() {
            let v: u8 = field.parse().map_err(|_| err(format!("pixel {col}: `{field}` is not an integer in 0..=16")))?;
            if v > DIGIT_PIXEL_MAX {
                return Err(err(format!("pixel {col}: {v} exceeds {DIGIT_PIXEL_MAX}")));
            }
            inputs.push(f64::from(v));
        }
        let label_field = fields[DIGIT_FEATURES];
        let label: usize = label_field
            .parse()
            .map_err(|_| err(format!("label `{label_field}` is not an integer")))?;
        if label >= DIGIT_CLASSES {
            return Err(err(format!("label {label} is not a digit")));
        }
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(Error::Parse { line: 0, message: "no rows".to_string() });
    }
    LabeledDataset::new(inputs, DIGIT_FEATURES, Targets::Classes(labels))
}

/// Keeps the samples whose label is in `classes` and relabels them by the
/// label's rank among `classes` sorted ascending.
pub fn filter_classes(dataset: &LabeledDataset, classes: &[usize]) -> Result<LabeledDataset> {
    let labels = dataset
        .classes()
        .ok_or_else(|| Error::Unsupported("class filtering needs a classification dataset".into()))?;
    let mut keep: Vec<usize> = classes.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("no classes selected".into()));
    }
    let mut rows = Vec::new();
    let mut relabeled = Vec::new();
    for (i, y) in labels.iter().enumerate() {
        if let Ok(rank) = keep.binary_search(y) {
            rows.push(i);
            relabeled.push(rank);
        }
    }
    if rows.is_empty() {
        return Err(Error::InsufficientData { requested: 1, available: 0 });
    }
    let subset = dataset.subset(&rows)?;
    LabeledDataset::new(subset.inputs().to_vec(), subset.input_dim(), Targets::Classes(relabeled))
}

/// `k` distinct digits drawn uniformly, returned ascending.
pub fn choose_classes<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k == 0 || k > DIGIT_CLASSES {
        return Err(Error::InvalidArgument(format!("cannot choose {k} of {DIGIT_CLASSES} digits")));
    }
    let mut picked = sample(rng, DIGIT_CLASSES, k).into_vec();
    picked.sort_unstable();
    Ok(picked)
}
