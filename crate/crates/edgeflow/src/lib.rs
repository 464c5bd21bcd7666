//! Periodic tight-binding operators terminated by translating soft walls.
//!
//! The crate builds 1D convolution and Jacobi operators and 2D Bravais-lattice
//! models, computes Bloch bands and edge spectra of finite truncations, and
//! evaluates the spectral flow of the edge family `t ↦ H + W(t)` by two
//! independent finite-matrix methods.

// `!(x > 0.0)` style checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bands;
pub mod dislocation;
pub mod edge;
pub mod error;
pub mod fmt;
pub mod io;
pub mod kernel;
pub mod lattice2d;
pub mod linalg;
pub mod random;
pub mod specflow;
pub mod verify;
pub mod walls;

pub use error::{Error, Result};
