//! Qudit states, the spin-ℓ generators and the rotations they produce.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use once_cell::race::OnceBox;

use crate::linalg::{self, CMatrix, HermitianEigen, C64, ONE, ZERO};
use crate::{Error, Result};

const NORM_TOLERANCE: f64 = 1e-12;
const HERMITIAN_TOLERANCE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Pure state of a `d`-level system, `Σ_k c_k |k⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuditState {
    amplitudes: Vec<C64>,
}

impl QuditState {
    /// Basis state `|k⟩`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        check_dim(d)?;
        if k >= d {
            return Err(Error::LabelOutOfRange { label: k, classes: d });
        }
        let mut amplitudes = vec![ZERO; d];
        amplitudes[k] = ONE;
        Ok(QuditState { amplitudes })
    }

    /// Validates normalization (within 1e-12) and wraps the amplitudes.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let n = linalg::norm_sqr(&amplitudes);
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!("state norm² is {n}, expected 1")));
        }
        Ok(QuditState { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let n = linalg::norm_sqr(&amplitudes).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument(format!("cannot normalize a vector of norm {n}")));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(QuditState { amplitudes })
    }

    pub(crate) fn from_raw(amplitudes: Vec<C64>) -> Self {
        QuditState { amplitudes }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::norm_sqr(&self.amplitudes).sqrt()
    }

    /// `⟨self|other⟩`
    pub fn overlap(&self, other: &QuditState) -> C64 {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }
}

/// Hermitian generator with a lazily computed, cached eigendecomposition.
pub struct GeneratorMatrix {
    matrix: CMatrix,
    nonzeros: Vec<(usize, usize, C64)>,
    diagonal: bool,
    /// Real diagonal, used when `diagonal` is set.
    diagonal_values: Vec<f64>,
    eigen: OnceBox<HermitianEigen>,
}

impl GeneratorMatrix {
    /// Rejects matrices that are not Hermitian to 1e-14.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let err = matrix.hermiticity_error();
        if !(err <= HERMITIAN_TOLERANCE) {
            return Err(Error::InvalidArgument(format!("generator is not Hermitian (error {err:e})")));
        }
        let n = matrix.dim();
        let mut nonzeros = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let v = matrix[(r, c)];
                if v != ZERO {
                    nonzeros.push((r, c, v));
                }
            }
        }
        let diagonal = nonzeros.iter().all(|&(r, c, _)| r == c);
        let diagonal_values = (0..n).map(|k| matrix[(k, k)].re).collect();
        Ok(GeneratorMatrix { matrix, nonzeros, diagonal, diagonal_values, eigen: OnceBox::new() })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    #[inline]
    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// Nonzero entries `(row, col, value)` in row-major order.
    pub fn nonzeros(&self) -> &[(usize, usize, C64)] {
        &self.nonzeros
    }

    pub fn eigen(&self) -> &HermitianEigen {
        self.eigen.get_or_init(|| Box::new(HermitianEigen::new(&self.matrix)))
    }

    /// `out = G v`
    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = ZERO);
        for &(r, c, g) in &self.nonzeros {
            out[r] += g * v[c];
        }
    }

    /// `⟨a|G|b⟩`
    pub fn sandwich(&self, a: &[C64], b: &[C64]) -> C64 {
        self.nonzeros.iter().fold(ZERO, |acc, &(r, c, g)| acc + a[r].conj() * g * b[c])
    }

    /// Applies `e^{-iθG}` to `state` in place. `scratch` must hold `dim` entries.
    pub fn rotate_in_place(&self, theta: f64, state: &mut [C64], scratch: &mut [C64]) {
        if theta == 0.0 {
            return;
        }
        if self.diagonal {
            apply_spectral_phases(theta, &self.diagonal_values, state);
            return;
        }
        let eig = self.eigen();
        let v = &eig.vectors;
        v.adjoint_matvec_into(state, scratch);
        apply_spectral_phases(theta, &eig.values, scratch);
        v.matvec_into(scratch, state);
    }
}

/// `s_k *= e^{-iθλ_k}`. Equally spaced spectra (the spin matrices) use a
/// two-evaluation recurrence instead of one `sin_cos` per entry.
fn apply_spectral_phases(theta: f64, values: &[f64], s: &mut [C64]) {
    let n = values.len();
    let step = if n > 1 { (values[n - 1] - values[0]) / (n - 1) as f64 } else { 0.0 };
    let uniform = values.iter().enumerate().all(|(k, v)| (v - values[0] - k as f64 * step).abs() <= 1e-13);
    if uniform {
        let mut cur = phase(-theta * values[0]);
        let inc = phase(-theta * step);
        for a in s.iter_mut() {
            *a *= cur;
            cur *= inc;
        }
    } else {
        for (a, &l) in s.iter_mut().zip(values) {
            *a *= phase(-theta * l);
        }
    }
}

impl Clone for GeneratorMatrix {
    fn clone(&self) -> Self {
        let eigen = OnceBox::new();
        if let Some(e) = self.eigen.get() {
            let _ = eigen.set(Box::new(e.clone()));
        }
        GeneratorMatrix {
            matrix: self.matrix.clone(),
            nonzeros: self.nonzeros.clone(),
            diagonal: self.diagonal,
            diagonal_values: self.diagonal_values.clone(),
            eigen,
        }
    }
}

impl core::fmt::Debug for GeneratorMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("GeneratorMatrix").field("matrix", &self.matrix).finish()
    }
}

/// Unitary matrix acting on a single qudit.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryGate {
    matrix: CMatrix,
}

impl UnitaryGate {
    pub fn identity(d: usize) -> Self {
        UnitaryGate { matrix: CMatrix::identity(d) }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn then(&self, next: &UnitaryGate) -> UnitaryGate {
        UnitaryGate { matrix: next.matrix.matmul(&self.matrix) }
    }
}

#[inline]
pub(crate) fn phase(angle: f64) -> C64 {
    let (s, c) = angle.sin_cos();
    C64::new(c, s)
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// `γ_{d,k} = sqrt((d - k - 1)(k + 1))`, the ladder matrix element between
/// `|k⟩` and `|k + 1⟩` (up to the factor ½).
#[inline]
pub fn ladder_coefficient(d: usize, k: usize) -> f64 {
    (((d - k - 1) * (k + 1)) as f64).sqrt()
}

/// `L_z` eigenvalue `m = (2k - d + 1) / 2` of basis state `|k⟩`.
#[inline]
pub fn magnetic_number(d: usize, k: usize) -> f64 {
    (2.0 * k as f64 - d as f64 + 1.0) / 2.0
}

/// Spin-ℓ angular momentum matrix with `ℓ = (d - 1) / 2`.
pub fn angular_momentum(d: usize, axis: Axis) -> Result<GeneratorMatrix> {
    check_dim(d)?;
    let mut m = CMatrix::zeros(d);
    match axis {
        Axis::Z => {
            for k in 0..d {
                m[(k, k)] = C64::new(magnetic_number(d, k), 0.0);
            }
        }
        Axis::X | Axis::Y => {
            for k in 0..d - 1 {
                let half = 0.5 * ladder_coefficient(d, k);
                // ⟨k+1|L|k⟩; the mirrored entry is its conjugate.
                let lower = match axis {
                    Axis::X => C64::new(half, 0.0),
                    _ => C64::new(0.0, -half),
                };
                m[(k + 1, k)] = lower;
                m[(k, k + 1)] = lower.conj();
            }
        }
    }
    GeneratorMatrix::new(m)
}

/// One-axis twisting generator `L_z²`.
pub fn squeezing_generator(d: usize) -> Result<GeneratorMatrix> {
    check_dim(d)?;
    let diag: Vec<C64> = (0..d).map(|k| C64::new(magnetic_number(d, k).powi(2), 0.0)).collect();
    GeneratorMatrix::new(CMatrix::from_diagonal(&diag))
}

/// `X_j = |0⟩⟨0| - |j⟩⟨j|` and `Y_j = |0⟩⟨j| + |j⟩⟨0|` for `j = 1..d-1`,
/// ordered `X_1, Y_1, X_2, Y_2, …`.
pub fn extended_operators(d: usize) -> Result<Vec<GeneratorMatrix>> {
    check_dim(d)?;
    let mut out = Vec::with_capacity(2 * (d - 1));
    for j in 1..d {
        let mut x = CMatrix::zeros(d);
        x[(0, 0)] = ONE;
        x[(j, j)] = -ONE;
        let mut y = CMatrix::zeros(d);
        y[(0, j)] = ONE;
        y[(j, 0)] = ONE;
        out.push(GeneratorMatrix::new(x)?);
        out.push(GeneratorMatrix::new(y)?);
    }
    Ok(out)
}

/// Checks that `perm` is a bijection on `0..d`.
pub fn validate_permutation(perm: &[usize], d: usize) -> Result<()> {
    if perm.len() != d {
        return Err(Error::InvalidPermutation(d));
    }
    let mut seen = vec![false; d];
    for &p in perm {
        if p >= d || seen[p] {
            return Err(Error::InvalidPermutation(d));
        }
        seen[p] = true;
    }
    Ok(())
}

/// `L̃_x`: the `L_x` ladder rewired through a permuted basis, coupling
/// `|P(k)⟩ ↔ |P(k+1)⟩` with weight `½γ_{d,k}`.
pub fn randomized_ladder(d: usize, permutation: &[usize]) -> Result<GeneratorMatrix> {
    check_dim(d)?;
    validate_permutation(permutation, d)?;
    let mut m = CMatrix::zeros(d);
    for k in 0..d - 1 {
        let w = C64::new(0.5 * ladder_coefficient(d, k), 0.0);
        let (a, b) = (permutation[k + 1], permutation[k]);
        m[(a, b)] = w;
        m[(b, a)] = w;
    }
    GeneratorMatrix::new(m)
}

/// `R(θ) = e^{-iθG}` from the generator's cached eigendecomposition.
pub fn rotation(gen: &GeneratorMatrix, theta: f64) -> UnitaryGate {
    if theta == 0.0 {
        return UnitaryGate::identity(gen.dim());
    }
    UnitaryGate { matrix: gen.eigen().map_spectrum(|l| phase(-theta * l)) }
}

/// Assembles `A = Σ_m coeffs[m] gens[m]` (Hermitian, not cached).
pub fn weighted_sum(gens: &[&GeneratorMatrix], coeffs: &[f64]) -> Result<CMatrix> {
    if gens.is_empty() || gens.len() != coeffs.len() {
        return Err(Error::LengthMismatch { left: gens.len(), right: coeffs.len() });
    }
    let d = gens[0].dim();
    let mut a = CMatrix::zeros(d);
    for (g, &c) in gens.iter().zip(coeffs) {
        if g.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
        }
        for &(r, col, v) in g.nonzeros() {
            a[(r, col)] += v * c;
        }
    }
    Ok(a)
}

/// `e^{-iA}` with `A = Σ_m coeffs[m] gens[m]`, via a fresh eigendecomposition.
pub fn exp_weighted_sum(gens: &[&GeneratorMatrix], coeffs: &[f64]) -> Result<UnitaryGate> {
    let a = weighted_sum(gens, coeffs)?;
    let eig = HermitianEigen::new(&a);
    Ok(UnitaryGate { matrix: eig.map_spectrum(|l| phase(-l)) })
}

pub fn apply(gate: &UnitaryGate, state: &QuditState) -> Result<QuditState> {
    if gate.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: gate.dim(), found: state.dim() });
    }
    Ok(QuditState { amplitudes: gate.matrix.matvec(&state.amplitudes) })
}

/// Binomial coefficient as a float; exact for the sizes used here.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Spin-coherent state pointing at `(polar, azimuth)`, with `polar = 0` at `|0⟩`.
pub fn spin_coherent_state(d: usize, polar: f64, azimuth: f64) -> Result<QuditState> {
    check_dim(d)?;
    let (s, c) = (0.5 * polar).sin_cos();
    let amplitudes = (0..d)
        .map(|k| {
            let mag = binomial(d - 1, k).sqrt() * c.powi((d - 1 - k) as i32) * s.powi(k as i32);
            phase(azimuth * k as f64) * mag
        })
        .collect();
    Ok(QuditState { amplitudes })
}
