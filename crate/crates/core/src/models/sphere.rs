//! Flat sphere with one 4π point at `z = 0` and six π points `z₁ … z₆`,
//! metric `|z|²|dz|² / Π|z − z_k|`.
//!
//! The square root `√Π(w − z_k)` is fixed as `K·Π √(1 − w/z_k)` with
//! principal roots and `K = √Π(−z_k)`; it is continuous on any segment from
//! 0 that avoids the `z_k`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Capabilities, ModelSpec, SpectralModel, SpectrumList, ZeroLimit};
use crate::channels::{ChannelId, ChannelSet};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::numerics::quadrature::{integrate, QuadOptions};

/// Order to which the integrand is expanded; `{z, ζ}` needs three terms.
const SERIES_ORDER: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct SphereConfig {
    points: Vec<Complex64>,
}

impl SphereConfig {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.len() != 6 {
            return Err(Error::Config(format!(
                "need six π points, got {}",
                points.len()
            )));
        }
        for (i, a) in points.iter().enumerate() {
            if a.norm() < 1e-12 || !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::Config(format!(
                    "point z{} = {a} must be finite and nonzero",
                    i + 1
                )));
            }
            for b in &points[..i] {
                if (a - b).norm() < 1e-12 {
                    return Err(Error::Config(format!(
                        "points must be distinct, {a} repeats"
                    )));
                }
            }
        }
        Ok(Self { points })
    }

    /// `z_k = e^{iπ(k−1)/3}`.
    pub fn regular_hexagon() -> Self {
        Self::new(
            (0..6)
                .map(|k| Complex64::from_polar(1.0, PI * k as f64 / 3.0))
                .collect(),
        )
        .expect("valid")
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// `K = √Π(−z_k)`, principal branch.
    fn k_const(&self) -> Complex64 {
        self.points.iter().map(|z| -z).product::<Complex64>().sqrt()
    }

    /// `1/√Π(w − z_k)` on the fixed branch.
    fn inv_root(&self, w: Complex64) -> Complex64 {
        let mut p = self.k_const();
        for z in &self.points {
            p *= (Complex64::new(1.0, 0.0) - w / z).sqrt();
        }
        p.inv()
    }

    fn check_segment(&self, z: Complex64) -> Result<()> {
        for zk in &self.points {
            // distance from z_k to the segment [0, z]
            let t = if z.norm_sqr() == 0.0 {
                0.0
            } else {
                ((zk * z.conj()).re / z.norm_sqr()).clamp(0.0, 1.0)
            };
            if (zk - z * t).norm() < 1e-12 * (1.0 + zk.norm()) {
                return Err(Error::BranchPoint {
                    z: format!("{z}"),
                    branch_point: format!("{zk}"),
                });
            }
        }
        Ok(())
    }

    /// Taylor coefficients of `1/√Π(w − z_k)` at `w = 0`.
    fn inv_root_series(&self, order: usize) -> Vec<Complex64> {
        // (1 − x)^{−1/2} = Σ C(2n,n)/4ⁿ xⁿ
        let mut binom = vec![1.0f64; order + 1];
        for n in 1..=order {
            binom[n] = binom[n - 1] * (2 * n - 1) as f64 / (2 * n) as f64;
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); order + 1];
        acc[0] = self.k_const().inv();
        for z in &self.points {
            let f: Vec<Complex64> = (0..=order)
                .map(|n| binom[n] * z.inv().powu(n as u32))
                .collect();
            let mut next = vec![Complex64::new(0.0, 0.0); order + 1];
            for i in 0..=order {
                for j in 0..=order - i {
                    next[i + j] += acc[i] * f[j];
                }
            }
            acc = next;
        }
        acc
    }
}

/// Distinguished local parameter `ζ(z) = (∫₀^z w dw / √Π(w − z_k))^{1/2}` at the 4π point,
/// on the branch with `ζ ~ c z`, `Re c ≥ 0`.
pub fn sphere_distinguished_param(cfg: &SphereConfig, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    cfg.check_segment(z)?;
    let opts = QuadOptions {
        atol: 1e-14,
        rtol: 1e-13,
        max_subdivisions: 4000,
    };
    // Φ(z)/z² = ∫₀¹ t / √Π(tz − z_k) dt
    let ratio = integrate(|t| cfg.inv_root(z * t) * t, 0.0, 1.0, &opts)?.value;
    let half_g0 = cfg.k_const().inv() * 0.5;
    let c = half_g0.sqrt();
    Ok(z * c * (ratio / half_g0).sqrt())
}

/// Coefficients `b₁, b₂, b₃` of the inverse map `z(ζ) = b₁ζ + b₂ζ² + b₃ζ³ + …`.
pub(crate) fn inverse_map_coefficients(cfg: &SphereConfig) -> [Complex64; 3] {
    let g = cfg.inv_root_series(SERIES_ORDER);
    let half_g0 = g[0] * 0.5;
    // Φ/z² = Σ g_n zⁿ/(n+2) = (g₀/2)(1 + Σ c_n zⁿ)
    let c: Vec<Complex64> = (0..=SERIES_ORDER)
        .map(|n| g[n] / (n as f64 + 2.0) / half_g0)
        .collect();
    // √(1 + Σ c_n zⁿ)
    let mut d = vec![Complex64::new(0.0, 0.0); SERIES_ORDER + 1];
    d[0] = Complex64::new(1.0, 0.0);
    for n in 1..=SERIES_ORDER {
        let mut s = c[n];
        for k in 1..n {
            s -= d[k] * d[n - k];
        }
        d[n] = s * 0.5;
    }
    let lead = half_g0.sqrt();
    let (a1, a2, a3) = (lead, lead * d[1], lead * d[2]);
    let b1 = a1.inv();
    let b2 = -a2 / a1.powu(3);
    let b3 = (a2 * a2 * 2.0 - a1 * a3) / a1.powu(5);
    [b1, b2, b3]
}

/// `S̃(0)` over the channels ν = ±½ of the 4π point (order: −½, +½).
///
/// `S_{½½}(0) = −{z, ζ}(0)/6`, `S_{−½−½}(0)` is its conjugate and the
/// off-diagonal entries vanish.
pub fn sphere_s0_block(cfg: &SphereConfig) -> CMatrix {
    let [b1, b2, b3] = inverse_map_coefficients(cfg);
    let schwarzian = b3 * 6.0 / b1 - (b2 / b1).powu(2) * 6.0;
    let s = -schwarzian / 6.0;
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = s.conj();
    m[(1, 1)] = s;
    m
}

/// The sphere as a model: channel data and `S(0)` on the ν = ±½ block.
#[derive(Clone, Debug)]
pub struct SphereModel {
    cfg: SphereConfig,
    cs: ChannelSet,
}

impl SphereModel {
    pub fn new(cfg: SphereConfig) -> Result<Self> {
        let mut angles = vec![4.0 * PI];
        angles.extend(std::iter::repeat(PI).take(6));
        Ok(Self {
            cfg,
            cs: ChannelSet::new(&angles)?,
        })
    }

    pub fn config(&self) -> &SphereConfig {
        &self.cfg
    }

    /// Channel indices of ν = −½ and ν = +½ at the 4π point.
    pub fn half_channels(&self) -> [usize; 2] {
        [
            self.cs
                .index_of(ChannelId { point: 0, k: -1 })
                .expect("4π point has k = −1"),
            self.cs
                .index_of(ChannelId { point: 0, k: 1 })
                .expect("4π point has k = 1"),
        ]
    }
}

impl SpectralModel for SphereModel {
    fn channel_set(&self) -> &ChannelSet {
        &self.cs
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            negative_lambda: false,
            supports_positive_lambda: false,
            has_s0_log_channel: false,
            has_spectrum: false,
            analytic_derivative: false,
        }
    }

    fn s_matrix(&self, _lambda: f64) -> Result<CMatrix> {
        Err(Error::Unsupported(
            "the sphere model provides S(0) on the ν = ±1/2 block only".into(),
        ))
    }

    fn s_matrix_derivative(&self, lambda: f64) -> Result<CMatrix> {
        self.s_matrix(lambda)
    }

    fn s_matrix_at_zero(&self) -> Result<ZeroLimit> {
        let n = self.cs.len();
        let block = sphere_s0_block(&self.cfg);
        let idx = self.half_channels();
        let mut values = CMatrix::zeros(n, n);
        let mut defined = vec![vec![false; n]; n];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                values[(i, j)] = block[(a, b)];
                defined[i][j] = true;
            }
        }
        Ok(ZeroLimit { values, defined })
    }

    fn friedrichs_eigenvalues(&self, _max: f64) -> Result<SpectrumList> {
        Err(Error::Unsupported(
            "the sphere model has no spectrum solver".into(),
        ))
    }

    fn coupled_friedrichs_eigenvalues(
        &self,
        _channels: &[usize],
        max: f64,
    ) -> Result<SpectrumList> {
        self.friedrichs_eigenvalues(max)
    }

    /// Constants.
    fn friedrichs_kernel_dim(&self) -> usize {
        1
    }

    fn description(&self) -> ModelSpec {
        ModelSpec::Sphere {
            points: self.cfg.points.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}
