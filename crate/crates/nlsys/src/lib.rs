//! Numerical toolkit for a family of coupled nonlocal elliptic systems:
//! closed-form dimension thresholds and Gamma-function criteria, a
//! one-dimensional discretization of the underlying integral operator,
//! branch continuation with stability tracking, and verification banks for
//! the energy inequalities the theory rests on.

pub mod config;
pub mod discretize;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod quad;
pub mod report;
pub mod solve;
pub mod special;
pub mod systems;
pub mod verify;

pub use error::{Error, Result};
