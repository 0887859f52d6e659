//! Binary PPM rasters of decision regions and Husimi distributions.

use std::f64::consts::PI;

use reupload_core::circuit::Circuit;
use reupload_core::learn::{predict_class, Readout};
use reupload_core::qudit::{self, spin_coherent_state, squeezing_generator, QuditState};

use crate::checkpoint::Checkpoint;
use crate::error::{CliError, Result};

/// Class colours, indexed by class label.
pub const PALETTE: [[u8; 3]; 10] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
    [188, 189, 34],
    [23, 190, 207],
];

/// `P6` image from row-major RGB triples.
pub fn ppm(width: usize, height: usize, rgb: &[[u8; 3]]) -> Vec<u8> {
    assert_eq!(rgb.len(), width * height);
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.extend(rgb.iter().flatten());
    out
}

/// Predicted class at every pixel of a `grid × grid` raster of `[-1, 1]²`,
/// row-major with the top row at `x₂ = +1` and the left column at `x₁ = -1`.
pub fn region_classes(checkpoint: &Checkpoint, grid: usize) -> Result<Vec<usize>> {
    let spec = checkpoint.spec.to_spec()?;
    if spec.input_dim != 2 {
        return Err(CliError::Failed(format!("decision regions need a 2-D input model, this one has D = {}", spec.input_dim)));
    }
    if grid < 2 {
        return Err(CliError::Failed("grid must be at least 2".into()));
    }
    let readout = checkpoint.readout()?;
    let circuit = Circuit::new(spec)?;
    let params = checkpoint.params()?;
    let bound = circuit.bind(params.as_slice())?;
    // Basis index → class label.
    let mut class_of = vec![usize::MAX; checkpoint.spec.dim];
    for (class, &basis) in checkpoint.label_permutation.iter().enumerate() {
        class_of[basis] = class;
    }
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (grid - 1) as f64;
    let mut tape = bound.tape();
    let mut out = Vec::with_capacity(grid * grid);
    for row in 0..grid {
        let x2 = -coord(row);
        for col in 0..grid {
            bound.record(&[coord(col), x2], &mut tape)?;
            let psi = tape.output();
            let class = match &readout {
                Readout::Basis => {
                    let probs: Vec<f64> = psi.iter().map(|a| a.norm_sqr()).collect();
                    class_of[predict_class(&probs)]
                }
                Readout::LabelStates(labels) => predict_class(&labels.overlaps_raw(psi).collect::<Vec<_>>()),
            };
            out.push(class);
        }
    }
    Ok(out)
}

pub fn render_regions(checkpoint: &Checkpoint, grid: usize) -> Result<Vec<u8>> {
    let classes = region_classes(checkpoint, grid)?;
    let rgb: Vec<[u8; 3]> = classes.iter().map(|&c| PALETTE[c % PALETTE.len()]).collect();
    Ok(ppm(grid, grid, &rgb))
}

/// Polar angle of Husimi raster row `r` (pixel centre).
pub fn husimi_polar(row: usize, resolution: usize) -> f64 {
    PI * (row as f64 + 0.5) / resolution as f64
}

/// Azimuth of Husimi raster column `c` (pixel centre), in `[-π, π)`.
pub fn husimi_azimuth(col: usize, resolution: usize) -> f64 {
    -PI + PI * (col as f64 + 0.5) / resolution as f64
}

/// `Q(θ, φ) = |⟨θ, φ|ψ⟩|²` over an equirectangular grid of
/// `resolution` rows (polar angle) by `2 · resolution` columns (azimuth).
pub fn husimi_values(state: &QuditState, resolution: usize) -> Result<Vec<f64>> {
    if resolution < 16 {
        return Err(CliError::Failed("Husimi resolution must be at least 16".into()));
    }
    let d = state.dim();
    let mut out = Vec::with_capacity(2 * resolution * resolution);
    for row in 0..resolution {
        for col in 0..2 * resolution {
            let coherent = spin_coherent_state(d, husimi_polar(row, resolution), husimi_azimuth(col, resolution))?;
            out.push(coherent.overlap(state).norm_sqr());
        }
    }
    Ok(out)
}

/// Grayscale rendering of [`husimi_values`], scaled so the maximum is white.
pub fn render_husimi(state: &QuditState, resolution: usize) -> Result<Vec<u8>> {
    let q = husimi_values(state, resolution)?;
    let max = q.iter().cloned().fold(0.0, f64::max);
    let rgb: Vec<[u8; 3]> = q
        .iter()
        .map(|&v| {
            let g = if max > 0.0 { (255.0 * v / max).round() as u8 } else { 0 };
            [g, g, g]
        })
        .collect();
    Ok(ppm(2 * resolution, resolution, &rgb))
}

/// Parses a state description:
///
/// * `basis:<d>:<k>`
/// * `coherent:<d>:<polar>:<azimuth>`
/// * `squeezed:<d>:<tau>:<polar>:<azimuth>`, i.e. `e^{-iτ L_z²}` applied to
///   the coherent state
///
/// Angles are in radians.
pub fn parse_state(text: &str) -> Result<QuditState> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::config(None, Some("--state"), format!("cannot parse state `{text}`"));
    let int = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let real = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let state = match parts.as_slice() {
        ["basis", d, k] => QuditState::basis(int(d)?, int(k)?),
        ["coherent", d, polar, azimuth] => spin_coherent_state(int(d)?, real(polar)?, real(azimuth)?),
        ["squeezed", d, tau, polar, azimuth] => {
            let (d, tau) = (int(d)?, real(tau)?);
            let (polar, azimuth) = (real(polar)?, real(azimuth)?);
            spin_coherent_state(d, polar, azimuth)
                .and_then(|c| qudit::apply(&qudit::rotation(&squeezing_generator(d)?, tau), &c))
        }
        _ => return Err(bad()),
    };
    state.map_err(|e| CliError::config(None, Some("--state"), e.to_string()))
}
