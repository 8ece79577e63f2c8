//! Exact symbolic verification of the quantization obstructions for the
//! cylinder `T*S^1`.
//!
//! The crate is organised bottom-up:
//!
//! - [`scalar`]: Gaussian rationals with formal real parameters.
//! - [`classical`]: the polynomial Poisson algebra in the `e^r_m` basis.
//! - [`operator`]: normal-ordered operators on Fourier modes.
//! - [`quant`]: quantization schemes, Von Neumann rules and the linear
//!   constraint solver.
//! - [`subalgebra`]: finite-cutoff closures, membership and structure scans.
//! - [`parse`]: the text grammar for scalars, classical and operator
//!   expressions.
//! - [`verify`]: the named check registry and its report formats.

pub mod classical;
pub mod operator;
pub mod parse;
pub mod quant;
pub mod scalar;
pub mod subalgebra;
pub mod verify;

pub use classical::{ClassicalElement, Mono};
pub use operator::{KetCombination, OpExpr, OperatorElement, Word};
pub use scalar::{GaussRat, Param, Scalar};
