//! Discrimination of two quantum states with classical side information.
//!
//! Given density matrices ρ and σ and pure-state decompositions of each, the
//! average trace distance `Δ = Σ pᵢ qⱼ δ(ψᵢ, φⱼ)` lies between the trace
//! distance `δ(ρ, σ)` and `√(1 - tr(ρσ))`. The upper value is reached exactly
//! by *unbiased* pairs, where every cross overlap `|<ψᵢ|φⱼ>|²` equals `tr(ρσ)`.
//!
//! - [`linalg`]: validated states and a Jacobi Hermitian eigensolver.
//! - [`metrics`]: classical and quantum distances, bounds, Helstrom
//!   measurement and a Monte Carlo of the discrimination game.
//! - [`decompose`]: mixing decompositions, the functional equalizer and the
//!   constructors for qubits, maximally mixed, pure and rank-two σ.
//! - [`conjecture`]: numerical search for unbiased pairs, batch fuzzing and
//!   the contextuality gap.
//! - [`io`]: JSON file formats.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar type. Default tolerances are binary64 values and are
//! floored near machine epsilon in single precision.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conjecture;
pub mod decompose;
pub mod error;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CMatrix64 = linalg::CMatrix<f64>;
pub type DensityMatrix64 = linalg::DensityMatrix<f64>;
pub type PureState64 = linalg::PureState<f64>;
pub type Spectrum64 = linalg::Spectrum<f64>;
pub type Decomposition64 = decompose::Decomposition<f64>;
pub type DecompositionPair64 = decompose::DecompositionPair<f64>;
pub type ClassicalDistribution64 = metrics::ClassicalDistribution<f64>;

pub type CMatrix32 = linalg::CMatrix<f32>;
pub type DensityMatrix32 = linalg::DensityMatrix<f32>;
pub type PureState32 = linalg::PureState<f32>;
pub type Decomposition32 = decompose::Decomposition<f32>;
pub type DecompositionPair32 = decompose::DecompositionPair<f32>;
