//! Simulation of the entropic Leggett-Garg test for spin-s systems.
//!
//! The crate is organized bottom-up:
//!
//! - [`qcore`]: dense complex matrices, spin operators, density matrices.
//! - [`protocols`]: single-, two- and three-time measurement circuits and
//!   their closed-form counterparts.
//! - [`entropy`]: Shannon entropies and the information deficit `D_n(θ)`.
//! - [`macrorealism`]: grand-distribution feasibility and a classical
//!   Markov baseline.
//! - [`sampling`]: finite-shot emulation and violation statistics.

pub mod entropy;
pub mod error;
pub mod macrorealism;
pub mod protocols;
pub mod qcore;
pub mod sampling;
mod table;

pub use error::{Error, Result};
pub use qcore::{ComplexMatrix, DensityMatrix, Spin};
pub use table::{ProbTable, CLAMP_TOL, MASS_TOL};
