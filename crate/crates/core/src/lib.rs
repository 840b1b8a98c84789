//! Compile a quantum circuit into a clock Hamiltonian and study adiabatic
//! paths between its beginning and problem Hamiltonians.
//!
//! The crate is organised bottom-up:
//!
//! - [`circuit`]: gates, circuit files, and the history states
//!   `|α_0⟩ … |α_L⟩` produced by running a circuit.
//! - [`clock`]: full computational ⊗ clock space operators (the per-gate
//!   terms, `H_B`, `H_P`, the moving-well Hamiltonian) and their projection
//!   onto the `(L+1)`-dimensional history subspace.
//! - [`reduced`]: the same Hamiltonians written directly as real symmetric
//!   tridiagonal matrices, plus the naive and three-stage schedules.
//! - [`spectral`]: Sturm-sequence eigensolver, gap scans, minimum-gap search,
//!   the secular equation of the crossing matrix, Gershgorin/Weyl bounds and
//!   log-linear gap scaling fits.
//! - [`evolution`]: Chebyshev exponential-midpoint propagation through the
//!   schedules, the continuum moving-well reference, and the discretisation
//!   error study.
//! - [`cli`]: the experiments behind the `clockforge` binary.
//!
//! Every capability has a runnable program under `examples/`.
//!
//! Index convention: reduced-space sites are numbered `m = 0 … L`, where site
//! `m` is the history state after `m` gates.

// `!(x > 0.0)` deliberately rejects NaN; index loops mirror the maths.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod circuit;
pub mod cli;
pub mod clock;
mod error;
pub mod evolution;
pub mod reduced;
pub mod spectral;

pub use error::{Error, Result};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
