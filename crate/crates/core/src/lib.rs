//! Spectral computations for Laplacians on flat surfaces with conical points.
//!
//! The crate evaluates S-matrices of solvable conical geometries, builds the
//! Krein determinant `D(λ) = det(P + Q S(λ))` for a self-adjoint extension
//! given by a boundary pair `(P, Q)`, and compares the resulting determinant
//! formula with an independent relative-zeta computation.

pub mod channels;
pub mod cli;
pub mod error;
pub mod krein;
pub mod linalg;
pub mod models;
pub mod numerics;
pub mod relzeta;
pub mod specfun;

pub use error::{Error, Result};
