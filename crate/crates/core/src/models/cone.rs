use num_complex::Complex64;

use super::{Capabilities, ModelSpec, SpectralModel, SpectrumList, ZeroLimit};
use crate::channels::{Channel, ChannelSet};
use crate::error::{Error, Result};
use crate::linalg::{real_diag, CMatrix};
use crate::specfun::{gamma_fn, LN2_MINUS_GAMMA};

/// Leading behaviour of a cone S-matrix entry at `λ = −t`, `t → ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LeadingTerm {
    /// `coef · t^exponent`
    Power { coef: f64, exponent: f64 },
    /// `½ ln t − (ln 2 − γ)`
    Log,
}

/// Power-channel prefactor `−Γ(1−a) / (2^{2a} Γ(1+a))` with `a = |ν|`.
fn power_prefactor(a: f64) -> Result<f64> {
    Ok(-gamma_fn(1.0 - a)? / (4f64.powf(a) * gamma_fn(1.0 + a)?))
}

pub fn cone_leading(nu: f64) -> Result<LeadingTerm> {
    if nu == 0.0 {
        return Ok(LeadingTerm::Log);
    }
    let a = nu.abs();
    Ok(LeadingTerm::Power {
        coef: power_prefactor(a)?,
        exponent: a,
    })
}

/// Diagonal entry of the infinite-cone S-matrix for channel exponent `ν`.
pub fn cone_entry(nu: f64, lambda: f64) -> Result<f64> {
    if !(lambda < 0.0) {
        return Err(Error::domain(
            "cone_s_matrix",
            "lambda",
            lambda,
            "the infinite cone needs λ < 0",
        ));
    }
    let t = -lambda;
    Ok(match cone_leading(nu)? {
        LeadingTerm::Log => 0.5 * t.ln() - LN2_MINUS_GAMMA,
        LeadingTerm::Power { coef, exponent } => coef * t.powf(exponent),
    })
}

/// `d/dλ` of [`cone_entry`].
pub fn cone_entry_derivative(nu: f64, lambda: f64) -> Result<f64> {
    let s = cone_entry(nu, lambda)?;
    Ok(if nu == 0.0 {
        0.5 / lambda
    } else {
        nu.abs() * s / lambda
    })
}

/// S-matrix of the infinite cone of angle `angle` over its channels.
pub fn cone_s_matrix(angle: f64, lambda: f64) -> Result<CMatrix> {
    let cs = ChannelSet::new(&[angle])?;
    cone_matrix_for(cs.channels(), lambda)
}

pub(crate) fn cone_matrix_for(channels: &[Channel], lambda: f64) -> Result<CMatrix> {
    let d: Vec<f64> = channels
        .iter()
        .map(|c| cone_entry(c.nu, lambda))
        .collect::<Result<_>>()?;
    Ok(real_diag(&d))
}

/// The infinite cone: `S(λ)` only, no discrete spectrum.
#[derive(Clone, Debug)]
pub struct InfiniteCone {
    angle: f64,
    cs: ChannelSet,
}

impl InfiniteCone {
    pub fn new(angle: f64) -> Result<Self> {
        Ok(Self {
            angle,
            cs: ChannelSet::new(&[angle])?,
        })
    }
}

impl SpectralModel for InfiniteCone {
    fn channel_set(&self) -> &ChannelSet {
        &self.cs
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            negative_lambda: true,
            supports_positive_lambda: false,
            has_s0_log_channel: false,
            has_spectrum: false,
            analytic_derivative: true,
        }
    }

    fn s_matrix(&self, lambda: f64) -> Result<CMatrix> {
        cone_matrix_for(self.cs.channels(), lambda)
    }

    fn s_matrix_derivative(&self, lambda: f64) -> Result<CMatrix> {
        let d: Vec<f64> = self
            .cs
            .channels()
            .iter()
            .map(|c| cone_entry_derivative(c.nu, lambda))
            .collect::<Result<_>>()?;
        Ok(real_diag(&d))
    }

    fn s_matrix_at_zero(&self) -> Result<ZeroLimit> {
        // power entries vanish like |λ|^{|ν|}; the log entry diverges
        let n = self.cs.len();
        let values = CMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        let defined = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| !(i == j && self.cs.channel(i).is_log()))
                    .collect()
            })
            .collect();
        Ok(ZeroLimit { values, defined })
    }

    fn friedrichs_eigenvalues(&self, _max: f64) -> Result<SpectrumList> {
        Err(Error::Unsupported(
            "the infinite cone has continuous spectrum".into(),
        ))
    }

    fn coupled_friedrichs_eigenvalues(
        &self,
        _channels: &[usize],
        _max: f64,
    ) -> Result<SpectrumList> {
        self.friedrichs_eigenvalues(0.0)
    }

    fn friedrichs_kernel_dim(&self) -> usize {
        0
    }

    fn description(&self) -> ModelSpec {
        ModelSpec::Cone { angle: self.angle }
    }
}
