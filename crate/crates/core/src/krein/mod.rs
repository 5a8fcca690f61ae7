//! The Krein determinant `D(λ) = det(P + Q·S(λ))` and what it encodes:
//! the trace of the resolvent difference, the spectrum of `Δ_L`, the
//! spectral shift and the constants entering the determinant comparison.

mod asymptotics;
mod comparison;
mod determinant;
mod oracle;
mod secular;

pub use asymptotics::{
    asymptotic_data, asymptotic_exponents, gamma_constant, AsymptoticData, AsymptoticExponents,
};
pub use comparison::{d_star_zero, det_ratio, DetComparison};
pub use determinant::{d_function, trace_resolvent_diff, BranchedLogD};
pub use oracle::{eigenvalue_trace_sum, TraceSum};
pub use secular::{
    secular_coupled, secular_spectrum, spectral_shift, spectral_shift_sweep, CoupledSpectrum,
    SecularSpectrum, SingularPoint,
};
