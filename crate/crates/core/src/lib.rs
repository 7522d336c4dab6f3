//! Matrix-variate gamma growth-decay models: matrix-argument gamma and
//! Whittaker functions in the real and complex cases, oriented residual
//! densities of `Y = X₁ − X₂`, and numerical verification of the integral
//! identities relating them.

pub mod config;
pub mod error;
pub mod eval;
pub mod gamma;
pub mod parallel;
pub mod quadrature;
pub mod residual;
pub mod rng;
pub mod spd;
pub mod verify;
pub mod whittaker;
pub mod zonal;

pub use error::{Error, Result};
pub use eval::{EvalResult, LogMoments, Method};
pub use parallel::Exec;
pub use rng::RandomStream;
pub use spd::{Definiteness, HermMatrix, Hermitian, HpdMatrix, PosDef, SpdMatrix, SymMatrix};
