//! Small dense complex matrices and Hermitian eigendecomposition.
//!
//! Matrices here are at most a few dozen rows (a qudit generator, or a
//! collective operator on a handful of qubits), so everything is a flat
//! row-major `Vec` with straightforward loops.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex;
#[allow(unused_imports)]
use num_traits::Float;

pub type C64 = Complex<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (k, &v) in diag.iter().enumerate() {
            m[(k, k)] = v;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        CMatrix { dim, data }
    }

    /// Builds from row-major entries. Panics if `data.len()` is not a square.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "row-major data must have dim² entries");
        CMatrix { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scaled(&self, s: C64) -> Self {
        CMatrix { dim: self.dim, data: self.data.iter().map(|&v| v * s).collect() }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, other: &CMatrix, s: f64) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                let orow = &mut out.data[r * n..(r + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        self.matvec_into(v, &mut out);
        out
    }

    pub fn matvec_into(&self, v: &[C64], out: &mut [C64]) {
        debug_assert_eq!(v.len(), self.dim);
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).iter().zip(v).fold(ZERO, |acc, (&a, &b)| acc + a * b);
        }
    }

    /// `out = self† v`
    pub fn adjoint_matvec_into(&self, v: &[C64], out: &mut [C64]) {
        debug_assert_eq!(v.len(), self.dim);
        out.iter_mut().for_each(|o| *o = ZERO);
        for (r, &vr) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * vr;
            }
        }
    }

    pub fn commutator(&self, other: &CMatrix) -> CMatrix {
        let mut ab = self.matmul(other);
        ab.add_scaled(&other.matmul(self), -1.0);
        ab
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `max |A - A†|`
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// `max |U†U - 1|`
    pub fn unitarity_error(&self) -> f64 {
        self.adjoint().matmul(self).max_abs_diff(&CMatrix::identity(self.dim))
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim;
        (0..n).all(|r| (0..n).all(|c| r == c || self[(r, c)] == ZERO))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

/// Eigendecomposition `A = V diag(values) V†` of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; column `p` of `vectors` belongs to
/// `values[p]`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(a: &CMatrix) -> Self {
        let n = a.dim();
        if a.is_diagonal() {
            // Exact: no rotation noise for L_z, L_z² and friends.
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&p, &q| a[(p, p)].re.total_cmp(&a[(q, q)].re));
            let values = order.iter().map(|&p| a[(p, p)].re).collect();
            let vectors = CMatrix::from_fn(n, |r, c| if order[c] == r { ONE } else { ZERO });
            return HermitianEigen { values, vectors };
        }
        let m = DMatrix::from_fn(n, n, |r, c| a[(r, c)]);
        let eig = m.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
        let values = order.iter().map(|&p| eig.eigenvalues[p]).collect();
        let vectors = CMatrix::from_fn(n, |r, c| eig.eigenvectors[(r, order[c])]);
        HermitianEigen { values, vectors }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V f(Λ) V†` for a scalar function applied to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let n = self.dim();
        let phases: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        CMatrix::from_fn(n, |r, c| {
            (0..n).fold(ZERO, |acc, p| acc + v[(r, p)] * phases[p] * v[(c, p)].conj())
        })
    }

    /// `max |A - V Λ V†|`
    pub fn reconstruction_error(&self, a: &CMatrix) -> f64 {
        self.map_spectrum(|l| C64::new(l, 0.0)).max_abs_diff(a)
    }
}

/// Eigendecomposition of a real symmetric `n × n` matrix given row-major.
///
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// rows of the second vector (row `p` spans `n` entries).
pub fn symmetric_eigen_desc(n: usize, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let m = DMatrix::from_fn(n, n, |r, c| 0.5 * (a[r * n + c] + a[c * n + r]));
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[q].total_cmp(&eig.eigenvalues[p]));
    let values = order.iter().map(|&p| eig.eigenvalues[p]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &p in &order {
        vectors.extend((0..n).map(|r| eig.eigenvectors[(r, p)]));
    }
    (values, vectors)
}

#[inline]
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

#[inline]
pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}
