//! Quadrature, root finding and extrapolation helpers.

pub mod extrapolate;
pub mod quadrature;
pub mod roots;
