//! Real-order special functions: Gamma, Bessel J/Y/I/K, Bessel zeros and
//! the Riemann zeta function.

mod bessel;
mod gamma;
mod zeros;
mod zeta;

pub use bessel::{
    bessel_i, bessel_ik_scaled, bessel_ik_scaled_with, bessel_j, bessel_jy, bessel_jy_with,
    bessel_k, bessel_y, BesselIKScaled, BesselJY,
};
pub use gamma::{gamma_fn, EULER_GAMMA};
pub use zeros::{bessel_j_zeros, bessel_j_zeros_below};
pub use zeta::{riemann_zeta, riemann_zeta_with_derivative};

pub(crate) use gamma::sin_pi;
pub(crate) use zeta::damped_zeta_near_one;

use crate::error::{Error, Result};

/// Accuracy knobs shared by the series and continued-fraction evaluators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecfunAccuracy {
    pub target_rtol: f64,
    pub max_series_terms: usize,
    /// J/Y switch to the Hankel expansion at and above this argument.
    pub asymptotic_switch_x: f64,
}

impl Default for SpecfunAccuracy {
    fn default() -> Self {
        Self {
            target_rtol: 1e-12,
            max_series_terms: 10_000,
            asymptotic_switch_x: 15.0,
        }
    }
}

impl SpecfunAccuracy {
    pub fn new(
        target_rtol: f64,
        max_series_terms: usize,
        asymptotic_switch_x: f64,
    ) -> Result<Self> {
        if !(target_rtol > 0.0) {
            return Err(Error::Config(format!(
                "target_rtol must be positive, got {target_rtol}"
            )));
        }
        if max_series_terms < 50 {
            return Err(Error::Config(format!(
                "max_series_terms must be at least 50, got {max_series_terms}"
            )));
        }
        if !(asymptotic_switch_x > 0.0) {
            return Err(Error::Config("asymptotic_switch_x must be positive".into()));
        }
        Ok(Self {
            target_rtol,
            max_series_terms,
            asymptotic_switch_x,
        })
    }
}

/// `ln 2 − γ`, the constant in the small-argument expansion of `K₀`.
pub const LN2_MINUS_GAMMA: f64 = std::f64::consts::LN_2 - EULER_GAMMA;
