//! Spectral decomposition of the linearized scalar BGK operator
//!
//! ```text
//! (L_ξ f)(v) = −(1 + ivξ) f(v) + ∫ f(r) w(r) dr,    w(v) = e^{−v²}/√π,
//! ```
//!
//! the Fourier-transformed generator of `∂_t f + v ∂_x f = ⟨f⟩ − f`.
//!
//! The crate is organized bottom-up:
//!
//! - [`numerics`]: the shared `v`/`λ` grid, weighted quadrature, the Dawson
//!   function and the Cauchy boundary operators `S_±`.
//! - [`dispersion`]: the determinant `ω(λ, ξ)`, its boundary values and the
//!   discrete eigenvalue curve `λ*(ξ)`.
//! - [`spectral`]: `L_ξ` on the grid, the discrete eigenmode, its Riesz
//!   projector and the resolvent.
//! - [`gft`]: the generalized Fourier transforms that diagonalize the
//!   continuous part, their adjoints and the Parseval pairing.
//! - [`evolution`]: spectral and direct time propagation, grossly
//!   determined solutions and decay diagnostics.
//! - [`acceptance`]: the verification criteria run by the test suite and by
//!   the `selftest` command.

pub mod acceptance;
pub mod dispersion;
mod error;
pub mod evolution;
pub mod gft;
pub mod numerics;
pub mod spectral;
pub mod testing;

pub use error::{Error, Result};
pub use numerics::{Grid, GridFunction, Side};

pub use num_complex::Complex64;
