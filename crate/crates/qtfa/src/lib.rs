//! An exact finite-dimensional laboratory for quantum time-frequency analysis.
//!
//! Everything lives on the cyclic group `Z_N` (N even) with centered
//! representatives `{-N/2, ..., N/2-1}`. Signals are complex vectors on the
//! grid, operators are N x N complex matrices, and phase-space functions are
//! N x N complex arrays indexed by `(x, omega)`. In this model the classical
//! time-frequency identities (Moyal, quantization unitarity, convolution
//! theorems) and the operator reconstruction and identification theorems hold
//! to machine precision, with every normalization constant pinned by tests.
//!
//! The crate is organized in layers:
//!
//! * [`phasespace`] - grids, separable lattices, adjoint lattices and
//!   fundamental domains;
//! * [`tfa`] - time-frequency shifts, STFT, ambiguity, Wigner, Rihaczek and
//!   the symplectic Fourier transform;
//! * [`quantize`] - operators, traces, spectral decompositions, Weyl and
//!   Kohn-Nirenberg quantization;
//! * [`qha`] - operator translations and modulations, operator convolutions,
//!   the Fourier-Wigner transform, the polarised Cohen's class, Gabor
//!   matrices and operator frames;
//! * [`symplectic`] / [`metaplectic`] - real symplectic matrix algebra with
//!   generator decompositions, and the corresponding unitary actions on
//!   phase-space functions;
//! * [`reconstruct`] - exact recovery of underspread, metaplectically
//!   underspread and modulation-invariant operators from Gabor-matrix
//!   diagonals;
//! * [`identify`] - Gram-matrix injectivity tests, least-squares operator
//!   identification and phase retrieval from spectrogram samples.
//!
//! The `book/` directory of the repository walks through the same material
//! chapter by chapter; its code snippets are compiled as doc-tests of this
//! crate (see the [`guide`] module).

pub mod error;
pub mod guide;
pub mod identify;
pub mod metaplectic;
pub mod phasespace;
pub mod qha;
pub mod quantize;
pub mod reconstruct;
pub mod selftest;
pub mod symplectic;
pub mod tfa;
pub mod util;

pub use error::{Error, Result};
pub use phasespace::{indicator_window, make_grid, make_lattice, FundamentalDomain, Grid, LatticeSpec, PhaseFn, Signal};
pub use quantize::OperatorMat;
pub use tfa::TFPoint;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
