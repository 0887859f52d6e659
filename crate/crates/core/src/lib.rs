//! Exact simulation and training of single-qudit data re-uploading models.
//!
//! A `d`-level qudit is treated as a spin with total angular momentum
//! `ℓ = (d - 1) / 2`. Basis index `k` corresponds to the magnetic quantum
//! number `m = (2k - d + 1) / 2`, so `|0⟩` is the lowest `L_z` eigenstate.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. Everything that touches files, threads or the terminal lives in
//! the companion `reupload` crate.
//!
//! Module map:
//!
//! * [`qudit`]: states, angular-momentum generators, rotations.
//! * [`circuit`]: the Euler, simplified and extended re-uploading layers,
//!   forward pass and adjoint gradients.
//! * [`learn`]: losses, predictions, shot sampling, ADAM training and
//!   multi-seed statistics.
//! * [`data`]: synthetic tasks, digits parsing, PCA, splits, label
//!   assignments and the k-nearest-neighbour baseline.
//! * [`qubitmap`]: Dicke-state embedding into `d - 1` qubits and the
//!   single-qubit multi-class baseline.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod circuit;
pub mod data;
mod error;
pub mod learn;
pub mod linalg;
pub mod qubitmap;
pub mod qudit;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
