//! Data re-uploading circuits on a single qudit.
//!
//! Three layer structures are supported:
//!
//! * **Euler**: `U = W(θ) S(x, ω)` with the encoding block
//!   `S = … R_z(x₂ω₂) R_x(x₁ω₁)` (axes alternate, starting with `x`) and
//!   `W = R_{z²}(θ₄) R_x(θ₃) R_z(θ₂) R_x(θ₁)`. Per-layer parameters are
//!   `[ω₁..ω_D, θ₁..θ₄]`.
//! * **Simplified**: `U = exp(-i Σ_j (θ_j + ω_j x_j) L_{c(j)} - i θ_{D+1} L_{z²})`
//!   with parameters `[θ₁..θ_D, ω₁..ω_D, θ_{D+1}]`. The generator cycle is
//!   `c = (L_x, L_z, L_y, L_x, …)`.
//! * **Extended**: the simplified data terms plus `Σ_m φ_m G_m` over the
//!   operators `X_1, Y_1, …, X_{d-1}, Y_{d-1}`, with parameters
//!   `[θ₁..θ_D, ω₁..ω_D, φ₁..φ_{2(d-1)}]`.
//!
//! Without squeezing, the squeezing angle is dropped from the layout. Layer
//! `l = 1` acts first on `|0⟩`.
//!
//! Gradients are computed with one forward pass that records intermediate
//! states and one reverse pass that carries the adjoint vector
//! `λ = U_{later}† g`, where `g_k = ∂L/∂Re ψ_k + i ∂L/∂Im ψ_k`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::learn;
use crate::linalg::{CMatrix, HermitianEigen, C64, ONE, ZERO};
use crate::qudit::{self, phase, Axis, GeneratorMatrix, QuditState};
use crate::{Error, Result};

/// Below this eigenvalue gap the divided difference uses its analytic limit.
pub const DEGENERACY_GAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Architecture {
    Euler,
    Simplified,
    Extended,
}

impl Architecture {
    pub fn name(self) -> &'static str {
        match self {
            Architecture::Euler => "euler",
            Architecture::Simplified => "simplified",
            Architecture::Extended => "extended",
        }
    }
}

impl core::str::FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(Architecture::Euler),
            "simplified" => Ok(Architecture::Simplified),
            "extended" => Ok(Architecture::Extended),
            other => Err(Error::InvalidArgument(format!("unknown architecture `{other}`"))),
        }
    }
}

/// Which operator plays the role of `L_x` inside the encoding gates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EncodingLadder {
    Standard,
    /// `L̃_x` built from this basis permutation.
    Randomized(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CircuitSpec {
    pub dim: usize,
    pub input_dim: usize,
    pub layers: usize,
    pub arch: Architecture,
    /// Ignored by the extended architecture.
    pub squeeze: bool,
    pub ladder: EncodingLadder,
}

impl CircuitSpec {
    /// Squeezing on, standard ladder.
    pub fn new(dim: usize, input_dim: usize, layers: usize, arch: Architecture) -> Result<Self> {
        let spec = CircuitSpec { dim, input_dim, layers, arch, squeeze: true, ladder: EncodingLadder::Standard };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_squeeze(mut self, squeeze: bool) -> Self {
        self.squeeze = squeeze;
        self
    }

    pub fn with_ladder(mut self, ladder: EncodingLadder) -> Self {
        self.ladder = ladder;
        self
    }

    pub fn with_layers(mut self, layers: usize) -> Self {
        self.layers = layers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidDimension(self.dim));
        }
        if self.input_dim < 1 {
            return Err(Error::InvalidArgument("input dimension must be at least 1".to_string()));
        }
        if self.layers < 1 {
            return Err(Error::InvalidArgument("a circuit needs at least one layer".to_string()));
        }
        if let EncodingLadder::Randomized(p) = &self.ladder {
            qudit::validate_permutation(p, self.dim)?;
        }
        Ok(())
    }

    /// Whether a squeezing angle is part of each layer.
    pub fn has_squeeze_param(&self) -> bool {
        self.squeeze && self.arch != Architecture::Extended
    }

    pub fn layer_param_count(&self) -> usize {
        let d_in = self.input_dim;
        let sq = usize::from(self.has_squeeze_param());
        match self.arch {
            Architecture::Euler => d_in + 3 + sq,
            Architecture::Simplified => 2 * d_in + sq,
            Architecture::Extended => 2 * d_in + 2 * (self.dim - 1),
        }
    }

    pub fn param_count(&self) -> usize {
        self.layer_param_count() * self.layers
    }
}

/// Number of trainable parameters of a circuit.
pub fn param_count(spec: &CircuitSpec) -> usize {
    spec.param_count()
}

/// Parameters of one layer, split by role.
///
/// `theta` holds the data-independent angles: three Euler angles plus the
/// squeezing angle for the Euler layer; the `D` offsets plus the squeezing
/// angle for the simplified layer; the `D` offsets for the extended layer.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerParameters {
    pub omega: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Flat trainable parameters in the documented per-layer layout.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterVector(pub Vec<f64>);

impl ParameterVector {
    pub fn zeros(spec: &CircuitSpec) -> Self {
        ParameterVector(vec![0.0; spec.param_count()])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn unpack(&self, spec: &CircuitSpec) -> Result<Vec<LayerParameters>> {
        check_len(spec, &self.0)?;
        let d_in = spec.input_dim;
        let sq = usize::from(spec.has_squeeze_param());
        Ok(self
            .0
            .chunks(spec.layer_param_count())
            .map(|p| match spec.arch {
                Architecture::Euler => LayerParameters {
                    omega: p[..d_in].to_vec(),
                    theta: p[d_in..].to_vec(),
                    phi: Vec::new(),
                },
                Architecture::Simplified => {
                    let mut theta = p[..d_in].to_vec();
                    theta.extend_from_slice(&p[2 * d_in..2 * d_in + sq]);
                    LayerParameters { omega: p[d_in..2 * d_in].to_vec(), theta, phi: Vec::new() }
                }
                Architecture::Extended => LayerParameters {
                    omega: p[d_in..2 * d_in].to_vec(),
                    theta: p[..d_in].to_vec(),
                    phi: p[2 * d_in..].to_vec(),
                },
            })
            .collect())
    }

    pub fn pack(spec: &CircuitSpec, layers: &[LayerParameters]) -> Result<Self> {
        if layers.len() != spec.layers {
            return Err(Error::LengthMismatch { left: layers.len(), right: spec.layers });
        }
        let mut out = Vec::with_capacity(spec.param_count());
        for l in layers {
            match spec.arch {
                Architecture::Euler => {
                    out.extend_from_slice(&l.omega);
                    out.extend_from_slice(&l.theta);
                }
                Architecture::Simplified => {
                    let d_in = spec.input_dim.min(l.theta.len());
                    out.extend_from_slice(&l.theta[..d_in]);
                    out.extend_from_slice(&l.omega);
                    out.extend_from_slice(&l.theta[d_in..]);
                }
                Architecture::Extended => {
                    out.extend_from_slice(&l.theta);
                    out.extend_from_slice(&l.omega);
                    out.extend_from_slice(&l.phi);
                }
            }
        }
        check_len(spec, &out)?;
        Ok(ParameterVector(out))
    }
}

fn check_len(spec: &CircuitSpec, params: &[f64]) -> Result<()> {
    let expected = spec.param_count();
    if params.len() != expected {
        return Err(Error::ParameterLength { expected, found: params.len() });
    }
    Ok(())
}

fn check_input(spec: &CircuitSpec, x: &[f64]) -> Result<()> {
    if x.len() != spec.input_dim {
        return Err(Error::DimensionMismatch { expected: spec.input_dim, found: x.len() });
    }
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput { index });
    }
    Ok(())
}

/// Generators used by a circuit, built once per spec.
#[derive(Clone, Debug)]
struct Operators {
    lx: GeneratorMatrix,
    ly: GeneratorMatrix,
    lz: GeneratorMatrix,
    lz2: GeneratorMatrix,
    /// `L̃_x` when the encoding ladder is randomized.
    encode_x: Option<GeneratorMatrix>,
    /// Terms of a summed layer after the data terms, one parameter each:
    /// `L_{z²}` (simplified, squeezing on) or the extended operators.
    extra: Vec<GeneratorMatrix>,
}

impl Operators {
    fn new(spec: &CircuitSpec) -> Result<Self> {
        let d = spec.dim;
        let encode_x = match &spec.ladder {
            EncodingLadder::Standard => None,
            EncodingLadder::Randomized(p) => Some(qudit::randomized_ladder(d, p)?),
        };
        let lz2 = qudit::squeezing_generator(d)?;
        let extra = match spec.arch {
            Architecture::Extended => qudit::extended_operators(d)?,
            Architecture::Simplified if spec.squeeze => alloc::vec![lz2.clone()],
            _ => Vec::new(),
        };
        let ops = Operators {
            lx: qudit::angular_momentum(d, Axis::X)?,
            ly: qudit::angular_momentum(d, Axis::Y)?,
            lz: qudit::angular_momentum(d, Axis::Z)?,
            lz2,
            encode_x,
            extra,
        };
        // Warm the caches so shared circuits never race on first use.
        ops.lx.eigen();
        ops.ly.eigen();
        if let Some(g) = &ops.encode_x {
            g.eigen();
        }
        Ok(ops)
    }

    fn encode_x(&self) -> &GeneratorMatrix {
        self.encode_x.as_ref().unwrap_or(&self.lx)
    }

    /// Euler encoding axis for input component `j` (0-based): x, z, x, z, …
    fn euler_encoding(&self, j: usize) -> &GeneratorMatrix {
        if j % 2 == 0 {
            self.encode_x()
        } else {
            &self.lz
        }
    }

    /// Simplified-layer generator for input component `j` (0-based).
    fn cycle(&self, j: usize) -> &GeneratorMatrix {
        match j % 3 {
            0 => self.encode_x(),
            1 => &self.lz,
            _ => &self.ly,
        }
    }
}

/// A circuit structure with its operators prepared; evaluate with [`Circuit::bind`].
#[derive(Clone, Debug)]
pub struct Circuit {
    spec: CircuitSpec,
    ops: Operators,
}

impl Circuit {
    pub fn new(spec: CircuitSpec) -> Result<Self> {
        spec.validate()?;
        let ops = Operators::new(&spec)?;
        Ok(Circuit { spec, ops })
    }

    pub fn spec(&self) -> &CircuitSpec {
        &self.spec
    }

    /// Precomputes everything that depends on the parameters only.
    pub fn bind(&self, params: &[f64]) -> Result<BoundCircuit<'_>> {
        check_len(&self.spec, params)?;
        let spec = &self.spec;
        let d_in = spec.input_dim;
        let stride = spec.layer_param_count();
        let layers = params
            .chunks(stride)
            .map(|p| match spec.arch {
                Architecture::Euler => {
                    let o = &self.ops;
                    BoundLayer::Euler {
                        rx1: qudit::rotation(&o.lx, p[d_in]).matrix().clone(),
                        rz2: diagonal_phases(&o.lz, p[d_in + 1]),
                        rx3: qudit::rotation(&o.lx, p[d_in + 2]).matrix().clone(),
                        squeeze: spec.squeeze.then(|| diagonal_phases(&o.lz2, p[d_in + 3])),
                    }
                }
                Architecture::Simplified | Architecture::Extended => {
                    let mut base = CMatrix::zeros(spec.dim);
                    for j in 0..d_in {
                        add_generator(&mut base, self.ops.cycle(j), p[j]);
                    }
                    for (g, &c) in self.ops.extra.iter().zip(&p[2 * d_in..]) {
                        add_generator(&mut base, g, c);
                    }
                    BoundLayer::Summed { base }
                }
            })
            .collect();
        Ok(BoundCircuit { circuit: self, params: params.to_vec(), layers })
    }

    pub fn forward(&self, params: &[f64], x: &[f64]) -> Result<QuditState> {
        self.bind(params)?.forward(x)
    }

    /// `∂L/∂p` given `g = ∂L/∂Re ψ + i ∂L/∂Im ψ` at the circuit output.
    pub fn gradient(&self, params: &[f64], x: &[f64], cost_gradient: &[C64]) -> Result<Vec<f64>> {
        let bound = self.bind(params)?;
        let mut tape = bound.tape();
        bound.record(x, &mut tape)?;
        let mut grad = vec![0.0; params.len()];
        bound.backward(x, &tape, cost_gradient, &mut grad)?;
        Ok(grad)
    }
}

fn diagonal_phases(g: &GeneratorMatrix, theta: f64) -> Vec<C64> {
    (0..g.dim()).map(|k| phase(-theta * g.matrix()[(k, k)].re)).collect()
}

fn add_generator(a: &mut CMatrix, g: &GeneratorMatrix, c: f64) {
    for &(r, col, v) in g.nonzeros() {
        a[(r, col)] += v * c;
    }
}

#[derive(Clone, Debug)]
enum BoundLayer {
    Euler { rx1: CMatrix, rz2: Vec<C64>, rx3: CMatrix, squeeze: Option<Vec<C64>> },
    /// Parameter-only part of the layer exponent.
    Summed { base: CMatrix },
}

/// Per-sample record of a forward pass, reused across samples.
#[derive(Clone, Debug, Default)]
pub struct Tape {
    /// Euler: state after every gate. Summed: `V†ψ_in` per layer.
    /// Flattened, `dim` amplitudes per entry.
    states: Vec<C64>,
    eigen: Vec<HermitianEigen>,
    output: Vec<C64>,
}

impl Tape {
    /// Output amplitudes of the last recorded pass.
    pub fn output(&self) -> &[C64] {
        &self.output
    }
}

/// A circuit with fixed parameters, ready for per-sample evaluation.
#[derive(Clone, Debug)]
pub struct BoundCircuit<'c> {
    circuit: &'c Circuit,
    params: Vec<f64>,
    layers: Vec<BoundLayer>,
}

impl<'c> BoundCircuit<'c> {
    pub fn spec(&self) -> &CircuitSpec {
        &self.circuit.spec
    }

    pub fn tape(&self) -> Tape {
        Tape::default()
    }

    pub fn forward(&self, x: &[f64]) -> Result<QuditState> {
        let mut tape = self.tape();
        self.record(x, &mut tape)?;
        Ok(QuditState::from_raw(tape.output))
    }

    /// Forward pass from `|0⟩`, recording what the reverse pass needs.
    pub fn record(&self, x: &[f64], tape: &mut Tape) -> Result<()> {
        let spec = self.spec();
        check_input(spec, x)?;
        let d = spec.dim;
        let d_in = spec.input_dim;
        let ops = &self.circuit.ops;
        let stride = spec.layer_param_count();
        let mut psi = core::mem::take(&mut tape.output);
        psi.clear();
        psi.resize(d, ZERO);
        psi[0] = ONE;
        let mut scratch = vec![ZERO; d];
        tape.states.clear();
        tape.eigen.clear();

        for (layer, p) in self.layers.iter().zip(self.params.chunks(stride)) {
            match layer {
                BoundLayer::Euler { rx1, rz2, rx3, squeeze } => {
                    for j in 0..d_in {
                        ops.euler_encoding(j).rotate_in_place(x[j] * p[j], &mut psi, &mut scratch);
                        tape.states.extend_from_slice(&psi);
                    }
                    apply_dense(rx1, &mut psi, &mut scratch);
                    tape.states.extend_from_slice(&psi);
                    apply_diagonal(rz2, &mut psi);
                    tape.states.extend_from_slice(&psi);
                    apply_dense(rx3, &mut psi, &mut scratch);
                    tape.states.extend_from_slice(&psi);
                    if let Some(ph) = squeeze {
                        apply_diagonal(ph, &mut psi);
                        tape.states.extend_from_slice(&psi);
                    }
                }
                BoundLayer::Summed { base } => {
                    let mut a = base.clone();
                    for j in 0..d_in {
                        add_generator(&mut a, ops.cycle(j), p[d_in + j] * x[j]);
                    }
                    let eig = HermitianEigen::new(&a);
                    let mut rotated = vec![ZERO; d];
                    eig.vectors.adjoint_matvec_into(&psi, &mut rotated);
                    for (s, (&r, &l)) in scratch.iter_mut().zip(rotated.iter().zip(&eig.values)) {
                        *s = r * phase(-l);
                    }
                    eig.vectors.matvec_into(&scratch, &mut psi);
                    tape.states.extend_from_slice(&rotated);
                    tape.eigen.push(eig);
                }
            }
        }
        tape.output = psi;
        Ok(())
    }

    /// Reverse pass; adds `∂L/∂p` into `grad`.
    pub fn backward(&self, x: &[f64], tape: &Tape, cost_gradient: &[C64], grad: &mut [f64]) -> Result<()> {
        let spec = self.spec();
        let d = spec.dim;
        if cost_gradient.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: cost_gradient.len() });
        }
        if grad.len() != self.params.len() {
            return Err(Error::ParameterLength { expected: self.params.len(), found: grad.len() });
        }
        let d_in = spec.input_dim;
        let ops = &self.circuit.ops;
        let stride = spec.layer_param_count();
        let mut lambda = cost_gradient.to_vec();
        let mut scratch = vec![ZERO; d];
        let mut state_idx = tape.states.len() / d;
        let state = |i: usize| &tape.states[i * d..(i + 1) * d];
        let mut eigen_idx = tape.eigen.len();

        for (l, layer) in self.layers.iter().enumerate().rev() {
            let base = l * stride;
            let p = &self.params[base..base + stride];
            let g = &mut grad[base..base + stride];
            match layer {
                BoundLayer::Euler { rx1, rz2, rx3, squeeze } => {
                    if let Some(ph) = squeeze {
                        state_idx -= 1;
                        g[d_in + 3] += ops.lz2.sandwich(&lambda, state(state_idx)).im;
                        apply_diagonal_adjoint(ph, &mut lambda);
                    }
                    state_idx -= 1;
                    g[d_in + 2] += ops.lx.sandwich(&lambda, state(state_idx)).im;
                    apply_dense_adjoint(rx3, &mut lambda, &mut scratch);
                    state_idx -= 1;
                    g[d_in + 1] += ops.lz.sandwich(&lambda, state(state_idx)).im;
                    apply_diagonal_adjoint(rz2, &mut lambda);
                    state_idx -= 1;
                    g[d_in] += ops.lx.sandwich(&lambda, state(state_idx)).im;
                    apply_dense_adjoint(rx1, &mut lambda, &mut scratch);
                    for j in (0..d_in).rev() {
                        state_idx -= 1;
                        let gen = ops.euler_encoding(j);
                        g[j] += x[j] * gen.sandwich(&lambda, state(state_idx)).im;
                        gen.rotate_in_place(-x[j] * p[j], &mut lambda, &mut scratch);
                    }
                }
                BoundLayer::Summed { .. } => {
                    state_idx -= 1;
                    eigen_idx -= 1;
                    let eig = &tape.eigen[eigen_idx];
                    let a = state(state_idx);
                    let k = summed_layer_sensitivity(eig, a, &lambda);
                    let dcoef = |gen: &GeneratorMatrix| -> f64 {
                        gen.nonzeros().iter().fold(0.0, |acc, &(r, c, v)| acc + (v * k[(r, c)]).re)
                    };
                    for j in 0..d_in {
                        let dc = dcoef(ops.cycle(j));
                        g[j] += dc;
                        g[d_in + j] += x[j] * dc;
                    }
                    for (m, gen) in ops.extra.iter().enumerate() {
                        g[2 * d_in + m] += dcoef(gen);
                    }
                    // λ ← U† λ = V e^{+iΛ} V† λ
                    eig.vectors.adjoint_matvec_into(&lambda, &mut scratch);
                    for (s, &l) in scratch.iter_mut().zip(&eig.values) {
                        *s *= phase(l);
                    }
                    eig.vectors.matvec_into(&scratch, &mut lambda);
                }
            }
        }
        Ok(())
    }
}

/// `K = conj(V) M Vᵀ` with `M_pq = conj(b_p) Φ_pq a_q`, `b = V†λ`, so that
/// `∂L/∂c = Re Σ_rs G_rs K_rs` for a term `c G` of the layer exponent.
///
/// `Φ` is the divided difference of `e^{-iλ}`, written as
/// `-i e^{-i(λ_p+λ_q)/2} sinc((λ_p-λ_q)/2)` to avoid cancellation.
fn summed_layer_sensitivity(eig: &HermitianEigen, a: &[C64], lambda: &[C64]) -> CMatrix {
    let d = eig.dim();
    let v = &eig.vectors;
    let mut b = vec![ZERO; d];
    v.adjoint_matvec_into(lambda, &mut b);
    let vals = &eig.values;
    // e^{-iλ/2} per eigenvalue; pair phases and most sines follow from these.
    let half_phase: Vec<C64> = vals.iter().map(|&l| phase(-0.5 * l)).collect();
    let m = CMatrix::from_fn(d, |p, q| {
        let gap = vals[p] - vals[q];
        let half = 0.5 * gap;
        let sinc = if gap.abs() < DEGENERACY_GAP {
            1.0
        } else if gap.abs() < 1e-2 {
            half.sin() / half
        } else {
            // sin((λ_p - λ_q)/2) = Im(e^{-iλ_q/2} conj(e^{-iλ_p/2}))
            (half_phase[q] * half_phase[p].conj()).im / half
        };
        let phi = half_phase[p] * half_phase[q] * C64::new(0.0, -sinc);
        b[p].conj() * phi * a[q]
    });
    // T = M Vᵀ, then K = conj(V) T.
    let t = CMatrix::from_fn(d, |p, s| (0..d).fold(ZERO, |acc, q| acc + m[(p, q)] * v[(s, q)]));
    CMatrix::from_fn(d, |r, s| (0..d).fold(ZERO, |acc, p| acc + v[(r, p)].conj() * t[(p, s)]))
}

#[inline]
fn apply_dense(u: &CMatrix, psi: &mut [C64], scratch: &mut [C64]) {
    u.matvec_into(psi, scratch);
    psi.copy_from_slice(scratch);
}

#[inline]
fn apply_dense_adjoint(u: &CMatrix, psi: &mut [C64], scratch: &mut [C64]) {
    u.adjoint_matvec_into(psi, scratch);
    psi.copy_from_slice(scratch);
}

#[inline]
fn apply_diagonal(phases: &[C64], psi: &mut [C64]) {
    psi.iter_mut().zip(phases).for_each(|(p, &f)| *p *= f);
}

#[inline]
fn apply_diagonal_adjoint(phases: &[C64], psi: &mut [C64]) {
    psi.iter_mut().zip(phases).for_each(|(p, &f)| *p *= f.conj());
}

/// Output state of the circuit for input `x`.
pub fn forward(spec: &CircuitSpec, params: &ParameterVector, x: &[f64]) -> Result<QuditState> {
    Circuit::new(spec.clone())?.forward(params.as_slice(), x)
}

/// `∂L/∂p` for every parameter, given `∂L/∂Re ψ + i ∂L/∂Im ψ` at the output.
pub fn gradient(spec: &CircuitSpec, params: &ParameterVector, x: &[f64], cost_gradient: &[C64]) -> Result<Vec<f64>> {
    Circuit::new(spec.clone())?.gradient(params.as_slice(), x, cost_gradient)
}

/// Fourier magnitudes of the expected label `⟨ȳ⟩(x)` sampled on
/// `grid_size` points of `[-π, π)`. Entry `k` is `(k, |F_k| / N)` for
/// `k = 0..=N/2`.
pub fn output_spectrum(spec: &CircuitSpec, params: &ParameterVector, grid_size: usize) -> Result<Vec<(f64, f64)>> {
    if spec.input_dim != 1 {
        return Err(Error::Unsupported(format!("spectrum needs a 1-D input, circuit has D = {}", spec.input_dim)));
    }
    if grid_size < 64 || !grid_size.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("grid size {grid_size} must be a power of two >= 64")));
    }
    let circuit = Circuit::new(spec.clone())?;
    let bound = circuit.bind(params.as_slice())?;
    let n = grid_size as f64;
    let step = 2.0 * core::f64::consts::PI / n;
    let mut values = Vec::with_capacity(grid_size);
    for i in 0..grid_size {
        let x = -core::f64::consts::PI + step * i as f64;
        let state = bound.forward(&[x])?;
        values.push(learn::expected_label(&learn::class_probabilities(&state)));
    }
    Ok(dft_magnitudes(&values))
}

/// `|F_k| / N` for `k = 0..=N/2` by direct summation.
pub fn dft_magnitudes(values: &[f64]) -> Vec<(f64, f64)> {
    let n = values.len();
    let two_pi_over_n = 2.0 * core::f64::consts::PI / n as f64;
    (0..=n / 2)
        .map(|k| {
            let sum = values.iter().enumerate().fold(ZERO, |acc, (i, &v)| {
                // Reduce k·i mod N first to keep the angle small.
                acc + phase(-two_pi_over_n * ((k * i) % n) as f64) * v
            });
            (k as f64, sum.norm() / n as f64)
        })
        .collect()
}
