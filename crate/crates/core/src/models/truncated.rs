//! Cone of angle θ truncated at radius R with a Dirichlet boundary circle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::cone::cone_entry;
use super::{Capabilities, ModelSpec, SpectralModel, SpectrumEntry, SpectrumList, ZeroLimit};
use crate::channels::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{real_diag, CMatrix};
use crate::numerics::quadrature::{integrate, QuadOptions};
use crate::specfun::{
    bessel_ik_scaled, bessel_j_zeros_below, bessel_jy, gamma_fn, sin_pi, LN2_MINUS_GAMMA,
};

/// Closest a Bessel zero may be to `kR` before `S` is reported as a pole.
const POLE_GUARD: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct TruncatedCone {
    angle: f64,
    radius: f64,
    cs: ChannelSet,
}

impl TruncatedCone {
    pub fn new(angle: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain(
                "TruncatedCone::new",
                "radius",
                radius,
                "radius must be positive",
            ));
        }
        Ok(Self {
            angle,
            radius,
            cs: ChannelSet::new(&[angle])?,
        })
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Angular exponent of sector `k`.
    pub fn sector_order(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.angle
    }

    /// `(S_νν(λ), dS_νν/dλ)` for one channel.
    pub fn entry_with_derivative(&self, nu: f64, lambda: f64) -> Result<(f64, f64)> {
        let r = self.radius;
        let a = nu.abs();
        if lambda < 0.0 {
            let kappa = (-lambda).sqrt();
            let x = kappa * r;
            let dk_dl = -0.5 / kappa;
            let b = bessel_ik_scaled(a, x)?;
            // K/I at the boundary; the scaled forms carry e^{∓x}
            let rho = b.k / b.i * (-2.0 * x).exp();
            // 1/I² at the boundary
            let inv_i2 = (-2.0 * x).exp() / (b.i * b.i);
            if a == 0.0 {
                let s = kappa.ln() - LN2_MINUS_GAMMA + rho;
                let ds = 1.0 / kappa - inv_i2 / kappa;
                return Ok((s, ds * dk_dl));
            }
            let sc = cone_entry(a, lambda)?;
            let c = 2.0 * sin_pi(a) / PI;
            let s = sc * (1.0 + c * rho);
            let ds = 2.0 * a / kappa * s - sc * c * inv_i2 / kappa;
            Ok((s, ds * dk_dl))
        } else if lambda > 0.0 {
            let k = lambda.sqrt();
            let x = k * r;
            let dk_dl = 0.5 / k;
            if a == 0.0 {
                let jy = bessel_jy(0.0, x)?;
                self.guard_pole(jy.j, lambda)?;
                let s = k.ln() - LN2_MINUS_GAMMA - 0.5 * PI * jy.y / jy.j;
                let ds = 1.0 / k - 1.0 / (k * jy.j * jy.j);
                return Ok((s, ds * dk_dl));
            }
            let jp = bessel_jy(a, x)?.j;
            let jm = bessel_jy(-a, x)?.j;
            self.guard_pole(jp, lambda)?;
            let pref = -(0.5 * k).powf(2.0 * a) * gamma_fn(1.0 - a)? / gamma_fn(1.0 + a)?;
            let s = pref * jm / jp;
            let ds = 2.0 * a / k * s - pref * 2.0 * sin_pi(a) / (PI * k * jp * jp);
            Ok((s, ds * dk_dl))
        } else {
            let s = if a == 0.0 { -r.ln() } else { -r.powf(-2.0 * a) };
            // derivative at 0 from the symmetric difference of the two branches
            let h = 1e-6 * (1.0 / (r * r)).min(1.0);
            let (sp, _) = self.entry_with_derivative(nu, h)?;
            let (sm, _) = self.entry_with_derivative(nu, -h)?;
            Ok((s, (sp - sm) / (2.0 * h)))
        }
    }

    fn guard_pole(&self, j: f64, lambda: f64) -> Result<()> {
        if j.abs() < POLE_GUARD {
            return Err(Error::Pole {
                function: "truncated cone S-matrix",
                at: lambda,
            });
        }
        Ok(())
    }

    /// Friedrichs eigenvalues of one angular sector.
    pub fn sector_eigenvalues(&self, k: i64, max: f64) -> Result<Vec<f64>> {
        let nu = self.sector_order(k).abs();
        let xmax = max.max(0.0).sqrt() * self.radius;
        let zeros = bessel_j_zeros_below(nu, xmax)?;
        Ok(zeros.iter().map(|z| (z / self.radius).powi(2)).collect())
    }

    fn sectors_below(&self, max: f64) -> Vec<i64> {
        // j_{ν,1} > ν, so sectors with ν ≥ √max·R contribute nothing
        let xmax = max.max(0.0).sqrt() * self.radius;
        let kmax = (xmax * self.angle / (2.0 * PI)).floor() as i64;
        (-kmax..=kmax).collect()
    }

    fn spectrum_of(&self, sectors: &[i64], max: f64) -> Result<SpectrumList> {
        let per: Vec<Vec<SpectrumEntry>> = sectors
            .par_iter()
            .map(|&k| {
                Ok(self
                    .sector_eigenvalues(k, max)?
                    .into_iter()
                    .map(|value| SpectrumEntry {
                        value,
                        multiplicity: 1,
                        sector: k,
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        SpectrumList::new(per.into_iter().flatten().collect(), max)
    }

    /// Radial factor of `G_ν` at `λ < 0`, normalized to unit `a⁻` coefficient.
    pub fn g_profile(&self, channel: usize, lambda: f64, samples: usize) -> Result<GProfile> {
        if !(lambda < 0.0) {
            return Err(Error::domain(
                "g_profile",
                "lambda",
                lambda,
                "requires λ < 0",
            ));
        }
        let ch = *self.cs.channel(channel);
        let radial = RadialG::new(ch.nu.abs(), lambda, self.radius)?;
        let n = samples.max(2);
        let r: Vec<f64> = (1..=n).map(|i| self.radius * i as f64 / n as f64).collect();
        let values = r
            .iter()
            .map(|&x| radial.eval(x))
            .collect::<Result<Vec<_>>>()?;
        let radial_integral = radial.weighted_square_integral()?;
        let (constant, norm_sq) = match ch.gram_constant(self.angle) {
            Some(c) => (c, c * c * self.angle * radial_integral),
            None => (ch.c_nu, ch.c_nu * ch.c_nu * self.angle * radial_integral),
        };
        Ok(GProfile {
            channel,
            nu: ch.nu,
            lambda,
            r,
            values,
            radial_integral,
            constant,
            norm_sq,
        })
    }
}

/// Radial factor `k(r)` of `G_ν` with `k ~ r^{-|ν|}` (or `ln r`) at the tip.
struct RadialG {
    a: f64,
    kappa: f64,
    radius: f64,
    /// `K/I` at the boundary.
    rho: f64,
    /// `1 / (coefficient of r^{-a} in K_a(κr))`; −1 for the log channel.
    scale: f64,
}

impl RadialG {
    fn new(a: f64, lambda: f64, radius: f64) -> Result<Self> {
        let kappa = (-lambda).sqrt();
        let x = kappa * radius;
        let b = bessel_ik_scaled(a, x)?;
        let rho = b.k / b.i * (-2.0 * x).exp();
        let scale = if a == 0.0 {
            -1.0
        } else {
            2.0 * sin_pi(a) * gamma_fn(1.0 - a)? * (0.5 * kappa).powf(a) / PI
        };
        Ok(Self {
            a,
            kappa,
            radius,
            rho,
            scale,
        })
    }

    fn eval(&self, r: f64) -> Result<f64> {
        let z = self.kappa * r;
        let b = bessel_ik_scaled(self.a, z)?;
        let k = b.k * (-z).exp();
        let i_term = self.rho * b.i * z.exp();
        Ok(self.scale * (k - i_term))
    }

    /// `∫₀^R k(r)² r dr`.
    fn weighted_square_integral(&self) -> Result<f64> {
        let opts = QuadOptions {
            atol: 1e-13,
            rtol: 1e-12,
            max_subdivisions: 4000,
        };
        if self.a == 0.0 {
            let res = integrate(
                |r| {
                    if r <= 0.0 {
                        return 0.0;
                    }
                    let v = self.eval(r).unwrap_or(f64::NAN);
                    v * v * r
                },
                0.0,
                self.radius,
                &opts,
            )?;
            return Ok(res.value);
        }
        // r = u^p with p = 1/(1−a) removes the r^{1−2a} endpoint singularity
        let p = 1.0 / (1.0 - self.a);
        let umax = self.radius.powf(1.0 / p);
        let res = integrate(
            |u| {
                if u <= 0.0 {
                    return 0.0;
                }
                let r = u.powf(p);
                let v = self.eval(r).unwrap_or(f64::NAN);
                v * v * r * p * u.powf(p - 1.0)
            },
            0.0,
            umax,
            &opts,
        )?;
        Ok(res.value)
    }
}

/// Sampled radial factor of `G_ν` and its squared norm.
#[derive(Clone, Debug, Serialize)]
pub struct GProfile {
    pub channel: usize,
    pub nu: f64,
    pub lambda: f64,
    pub r: Vec<f64>,
    /// `k(r)` with unit coefficient of `r^{-|ν|}` (of `ln r` for ν = 0).
    pub values: Vec<f64>,
    /// `∫₀^R k² r dr`.
    pub radial_integral: f64,
    /// Angular-mode prefactor used in `norm_sq`.
    pub constant: f64,
    /// `constant² · θ · radial_integral`, the squared L² norm of `G_ν`.
    pub norm_sq: f64,
}

/// Inner product `⟨G_ν, G_μ⟩` on the truncated cone.
///
/// With the prefactor `1/√(2|ν|θ)` this equals `dS_νν/dλ`. Distinct
/// channels at the same point are orthogonal.
pub fn g_gram(model: &dyn SpectralModel, mu: usize, nu: usize, lambda: f64) -> Result<Complex64> {
    let ModelSpec::TruncatedCone { angle, radius } = model.description() else {
        return Err(Error::Unsupported(
            "g_gram needs the truncated cone model".into(),
        ));
    };
    let tc = TruncatedCone::new(angle, radius)?;
    let n = tc.cs.len();
    if mu >= n || nu >= n {
        return Err(Error::DimensionMismatch(format!(
            "channel index out of range for {n} channels"
        )));
    }
    if mu != nu {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let p = tc.g_profile(nu, lambda, 2)?;
    Ok(Complex64::new(p.norm_sq, 0.0))
}

impl SpectralModel for TruncatedCone {
    fn channel_set(&self) -> &ChannelSet {
        &self.cs
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            negative_lambda: true,
            supports_positive_lambda: true,
            has_s0_log_channel: true,
            has_spectrum: true,
            analytic_derivative: true,
        }
    }

    fn s_matrix(&self, lambda: f64) -> Result<CMatrix> {
        if !lambda.is_finite() {
            return Err(Error::domain(
                "s_matrix",
                "lambda",
                lambda,
                "must be finite",
            ));
        }
        let d: Vec<f64> = self
            .cs
            .channels()
            .iter()
            .map(|c| self.entry_with_derivative(c.nu, lambda).map(|v| v.0))
            .collect::<Result<_>>()?;
        Ok(real_diag(&d))
    }

    fn s_matrix_derivative(&self, lambda: f64) -> Result<CMatrix> {
        let d: Vec<f64> = self
            .cs
            .channels()
            .iter()
            .map(|c| self.entry_with_derivative(c.nu, lambda).map(|v| v.1))
            .collect::<Result<_>>()?;
        Ok(real_diag(&d))
    }

    fn s_matrix_at_zero(&self) -> Result<ZeroLimit> {
        Ok(ZeroLimit::fully_defined(self.s_matrix(0.0)?))
    }

    fn friedrichs_eigenvalues(&self, max: f64) -> Result<SpectrumList> {
        self.spectrum_of(&self.sectors_below(max), max)
    }

    fn coupled_friedrichs_eigenvalues(&self, channels: &[usize], max: f64) -> Result<SpectrumList> {
        let sectors: Vec<i64> = channels.iter().map(|&c| self.cs.channel(c).id.k).collect();
        self.spectrum_of(&sectors, max)
    }

    fn friedrichs_kernel_dim(&self) -> usize {
        0
    }

    fn description(&self) -> ModelSpec {
        ModelSpec::TruncatedCone {
            angle: self.angle,
            radius: self.radius,
        }
    }
}
