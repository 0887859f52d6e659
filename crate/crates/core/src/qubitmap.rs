//! Dicke-state embedding of a qudit into `d - 1` qubits, collective spin
//! operators, and the single-qubit baseline with non-orthogonal label
//! states.
//!
//! Qubit `j` is bit `j` of the amplitude index (qubit 0 least significant)
//! and `|1⟩` is the spin-up state, so Hamming weight `k` maps to `L_z`
//! eigenvalue `(2k - n)/2`, matching qudit level `|k⟩`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::circuit::{Architecture, CircuitSpec, EncodingLadder, ParameterVector};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};
use crate::qudit::{self, Axis, GeneratorMatrix, QuditState};
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 12;
/// Largest residual outside the Dicke subspace accepted by [`project`].
pub const LEAKAGE_TOLERANCE: f64 = 1e-8;

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiQubitState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl MultiQubitState {
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::InvalidArgument(format!("{len} amplitudes is not a qubit register")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubits(n_qubits)?;
        let norm = linalg::norm_sqr(&amplitudes);
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidArgument(format!("state norm² is {norm}, expected 1")));
        }
        Ok(MultiQubitState { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn apply(&mut self, gate: &qudit::UnitaryGate) -> Result<()> {
        if gate.dim() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch { expected: self.amplitudes.len(), found: gate.dim() });
        }
        self.amplitudes = gate.matrix().matvec(&self.amplitudes);
        Ok(())
    }
}

/// `|D^n_k⟩`: equal superposition of all `n`-bit strings with `k` ones.
pub fn dicke_state(n_qubits: usize, k: usize) -> Result<MultiQubitState> {
    check_qubits(n_qubits)?;
    if k > n_qubits {
        return Err(Error::InvalidArgument(format!("Hamming weight {k} exceeds {n_qubits} qubits")));
    }
    let amp = C64::new(qudit::binomial(n_qubits, k).sqrt().recip(), 0.0);
    let amplitudes = (0..1usize << n_qubits)
        .map(|b| if b.count_ones() as usize == k { amp } else { ZERO })
        .collect();
    Ok(MultiQubitState { n_qubits, amplitudes })
}

/// Generator selector for [`collective_operator`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Collective {
    Axis(Axis),
    /// `(L^tot_z)²`, which contains every pairwise `zz` coupling.
    ZSquared,
}

/// `L^tot_a = Σ_j L_a^{(j)}` on `n_qubits` spin-½ particles, or its `z` square.
pub fn collective_operator(n_qubits: usize, which: Collective) -> Result<GeneratorMatrix> {
    check_qubits(n_qubits)?;
    let dim = 1usize << n_qubits;
    let z = |b: usize| (2.0 * b.count_ones() as f64 - n_qubits as f64) / 2.0;
    let mut m = CMatrix::zeros(dim);
    match which {
        Collective::Axis(Axis::Z) => (0..dim).for_each(|b| m[(b, b)] = C64::new(z(b), 0.0)),
        Collective::ZSquared => (0..dim).for_each(|b| m[(b, b)] = C64::new(z(b) * z(b), 0.0)),
        Collective::Axis(axis) => {
            let single = qudit::angular_momentum(2, axis)?;
            for b in 0..dim {
                for j in 0..n_qubits {
                    let bit = (b >> j) & 1;
                    let flipped = b ^ (1 << j);
                    m[(flipped, b)] += single.matrix()[(1 - bit, bit)];
                }
            }
        }
    }
    GeneratorMatrix::new(m)
}

/// `Σ c_k |k⟩ ↦ Σ c_k |D^{d-1}_k⟩`.
pub fn embed(state: &QuditState) -> Result<MultiQubitState> {
    let n = state.dim() - 1;
    check_qubits(n)?;
    let mut amplitudes = vec![ZERO; 1 << n];
    for (k, &c) in state.amplitudes().iter().enumerate() {
        let w = qudit::binomial(n, k).sqrt().recip();
        for (b, a) in amplitudes.iter_mut().enumerate() {
            if b.count_ones() as usize == k {
                *a = c * w;
            }
        }
    }
    Ok(MultiQubitState { n_qubits: n, amplitudes })
}

/// Dicke-basis coordinates of a register state and the norm of what is left over.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub state: QuditState,
    pub leakage: f64,
}

/// Inverse of [`embed`]; fails with [`Error::SubspaceLeakage`] when the
/// residual outside the Dicke subspace exceeds [`LEAKAGE_TOLERANCE`].
pub fn project(state: &MultiQubitState) -> Result<Projection> {
    let n = state.n_qubits;
    let mut coeffs = vec![ZERO; n + 1];
    for (b, &a) in state.amplitudes.iter().enumerate() {
        coeffs[b.count_ones() as usize] += a;
    }
    for (k, c) in coeffs.iter_mut().enumerate() {
        *c *= qudit::binomial(n, k).sqrt().recip();
    }
    let leakage = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(b, &a)| {
            let k = b.count_ones() as usize;
            (a - coeffs[k] * qudit::binomial(n, k).sqrt().recip()).norm_sqr()
        })
        .sum::<f64>()
        .sqrt();
    if leakage > LEAKAGE_TOLERANCE {
        return Err(Error::SubspaceLeakage(leakage));
    }
    Ok(Projection { state: QuditState::from_raw(coeffs), leakage })
}

/// Runs a circuit on the embedded register with collective operators only.
///
/// This is an independent dense simulation in `2^{d-1}` dimensions; the
/// result should agree with the qudit simulation after [`project`]. Only the
/// Euler and simplified architectures with the standard ladder have a
/// collective form.
pub fn embedded_forward(spec: &CircuitSpec, params: &ParameterVector, x: &[f64]) -> Result<MultiQubitState> {
    spec.validate()?;
    if spec.arch == Architecture::Extended {
        return Err(Error::Unsupported("the extended operators are not collective".into()));
    }
    if spec.ladder != EncodingLadder::Standard {
        return Err(Error::Unsupported("a permuted ladder is not collective".into()));
    }
    if x.len() != spec.input_dim {
        return Err(Error::DimensionMismatch { expected: spec.input_dim, found: x.len() });
    }
    let n = spec.dim - 1;
    check_qubits(n)?;
    let lx = collective_operator(n, Collective::Axis(Axis::X))?;
    let ly = collective_operator(n, Collective::Axis(Axis::Y))?;
    let lz = collective_operator(n, Collective::Axis(Axis::Z))?;
    let lz2 = collective_operator(n, Collective::ZSquared)?;
    let mut psi = embed(&QuditState::basis(spec.dim, 0)?)?;
    for layer in params.unpack(spec)? {
        match spec.arch {
            Architecture::Euler => {
                for (j, (&xj, &w)) in x.iter().zip(&layer.omega).enumerate() {
                    let g = if j % 2 == 0 { &lx } else { &lz };
                    psi.apply(&qudit::rotation(g, xj * w))?;
                }
                let t = &layer.theta;
                psi.apply(&qudit::rotation(&lx, t[0]))?;
                psi.apply(&qudit::rotation(&lz, t[1]))?;
                psi.apply(&qudit::rotation(&lx, t[2]))?;
                if spec.squeeze {
                    psi.apply(&qudit::rotation(&lz2, t[3]))?;
                }
            }
            _ => {
                let mut gens = Vec::new();
                let mut coeffs = Vec::new();
                for (j, &xj) in x.iter().enumerate() {
                    gens.push([&lx, &lz, &ly][j % 3]);
                    coeffs.push(layer.theta[j] + layer.omega[j] * xj);
                }
                if spec.squeeze {
                    gens.push(&lz2);
                    coeffs.push(layer.theta[spec.input_dim]);
                }
                psi.apply(&qudit::exp_weighted_sum(&gens, &coeffs)?)?;
            }
        }
    }
    Ok(psi)
}

/// Label states of the single-qubit multi-class baseline.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitLabelSet {
    states: Vec<[C64; 2]>,
}

impl QubitLabelSet {
    pub fn states(&self) -> &[[C64; 2]] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `|⟨label_y|ψ⟩|²` for each label; `psi` must have two amplitudes.
    pub fn overlaps_raw<'a>(&'a self, psi: &'a [C64]) -> impl Iterator<Item = f64> + 'a {
        self.states.iter().map(move |l| (l[0].conj() * psi[0] + l[1].conj() * psi[1]).norm_sqr())
    }
}

/// The `±` eigenstates of `σ_z`, `σ_x`, `σ_y` in that order, truncated to `d`
/// entries (`d ∈ {2, 3, 4, 6}`).
pub fn qubit_label_states(d: usize) -> Result<QubitLabelSet> {
    if ![2, 3, 4, 6].contains(&d) {
        return Err(Error::Unsupported(format!("no qubit label set for {d} classes")));
    }
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let ih = C64::new(0.0, FRAC_1_SQRT_2);
    let all = [[ONE, ZERO], [ZERO, ONE], [h, h], [h, -h], [h, ih], [h, -ih]];
    Ok(QubitLabelSet { states: all[..d].to_vec() })
}

/// `|⟨label_y|ψ⟩|²` for a single-qubit state.
pub fn qubit_baseline_overlaps(state: &QuditState, labels: &QubitLabelSet) -> Result<Vec<f64>> {
    if state.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: state.dim() });
    }
    Ok(labels.overlaps_raw(state.amplitudes()).collect())
}
