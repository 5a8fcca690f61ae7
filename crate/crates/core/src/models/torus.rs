//! Flat torus with one marked point, treated as a cone of angle 2π.
//!
//! `S₀₀(λ) = −2π m(λ)` where `m` is the regular part of the periodic
//! resolvent kernel on the diagonal. For `κ ℓ ≥ 1` (`κ = √−λ`, `ℓ` the
//! shortest lattice vector) the image sum over `K₀` converges fast; below
//! that, and for `λ > 0`, an Ewald split at time `T` is used:
//!
//! `m(λ) = (1/4π)[E(λT) − γ + ln 4T] + (1/A) Σ_ξ e^{−(|ξ|²−λ)T} / (|ξ|²−λ)`
//!
//! with `E(z) = Σ_{n≥1} zⁿ/(n·n!)`. `T ≤ ℓ²/144` makes the neglected
//! real-space images smaller than `e^{−36}`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use parking_lot::Mutex;

use super::{Capabilities, ModelSpec, SpectralModel, SpectrumEntry, SpectrumList, ZeroLimit};
use crate::channels::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::specfun::{bessel_ik_scaled, EULER_GAMMA, LN2_MINUS_GAMMA};

/// Truncate image sums once `κ|γ|` exceeds this (`K₀ < 1e-16`).
const IMAGE_CUTOFF: f64 = 36.0;
/// Truncate dual sums once `(|ξ|² − λ)T` exceeds this.
const DUAL_CUTOFF: f64 = 40.0;
const NORM_MERGE_RTOL: f64 = 1e-12;
const VALUE_CACHE_LIMIT: usize = 1 << 16;

/// Distinct vector norms with their multiplicities.
#[derive(Clone, Debug, Default)]
struct Shells {
    norms: Vec<f64>,
    counts: Vec<usize>,
}

impl Shells {
    /// All nonzero `|a u + b v|` not exceeding `rmax`, merged by norm.
    fn enumerate(u: [f64; 2], v: [f64; 2], rmax: f64, include_zero: bool) -> Self {
        let det = u[0] * v[1] - u[1] * v[0];
        // |a| ≤ rmax·|v|/|det| and |b| ≤ rmax·|u|/|det|
        let amax = (rmax * (v[0].hypot(v[1])) / det.abs()).ceil() as i64;
        let bmax = (rmax * (u[0].hypot(u[1])) / det.abs()).ceil() as i64;
        let mut sq: Vec<f64> = Vec::new();
        let r2 = rmax * rmax;
        for a in -amax..=amax {
            for b in -bmax..=bmax {
                if a == 0 && b == 0 && !include_zero {
                    continue;
                }
                let x = a as f64 * u[0] + b as f64 * v[0];
                let y = a as f64 * u[1] + b as f64 * v[1];
                let n2 = x * x + y * y;
                if n2 <= r2 * (1.0 + 1e-14) {
                    sq.push(n2);
                }
            }
        }
        sq.sort_by(f64::total_cmp);
        let mut out = Shells::default();
        for n2 in sq {
            match out.norms.last() {
                Some(&last) if (n2 - last).abs() <= NORM_MERGE_RTOL * n2.max(1e-300) => {
                    *out.counts.last_mut().unwrap() += 1;
                }
                _ => {
                    out.norms.push(n2);
                    out.counts.push(1);
                }
            }
        }
        out
    }
}

/// Dual-sum weights `m_j e^{−|ξ_j|² T} / A` for one Ewald time `T`.
#[derive(Debug)]
struct EwaldBin {
    t: f64,
    /// Squared dual norms `|ξ_j|²`.
    norms: Vec<f64>,
    weights: Vec<f64>,
}

/// Lattice `Λ = ℤ v₁ + ℤ v₂` with cached shells and Ewald weights.
#[derive(Debug)]
pub struct TorusLattice {
    v1: [f64; 2],
    v2: [f64; 2],
    area: f64,
    /// Reciprocal basis scaled by 2π: `⟨ξᵢ, vⱼ⟩ = 2π δᵢⱼ`.
    dual: [[f64; 2]; 2],
    shortest: f64,
    images: Shells,
    bins: Mutex<HashMap<i32, Arc<EwaldBin>>>,
    values: Mutex<HashMap<u64, (f64, f64)>>,
}

impl Clone for TorusLattice {
    fn clone(&self) -> Self {
        Self::new(self.v1, self.v2).expect("already validated")
    }
}

impl TorusLattice {
    pub fn new(v1: [f64; 2], v2: [f64; 2]) -> Result<Self> {
        let det = v1[0] * v2[1] - v1[1] * v2[0];
        if !(det.abs() > 1e-12 * (v1[0].hypot(v1[1]) * v2[0].hypot(v2[1]))) || !det.is_finite() {
            return Err(Error::domain(
                "TorusLattice::new",
                "det(v1, v2)",
                det,
                "lattice vectors must be independent",
            ));
        }
        let area = det.abs();
        let s = 2.0 * PI / det;
        let dual = [[v2[1] * s, -v2[0] * s], [-v1[1] * s, v1[0] * s]];
        let shortest = shortest_vector(v1, v2);
        let images = Shells::enumerate(v1, v2, IMAGE_CUTOFF * shortest, false);
        Ok(Self {
            v1,
            v2,
            area,
            dual,
            shortest,
            images,
            bins: Mutex::new(HashMap::new()),
            values: Mutex::new(HashMap::new()),
        })
    }

    pub fn unit_square() -> Self {
        Self::new([1.0, 0.0], [0.0, 1.0]).expect("valid")
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn shortest_vector(&self) -> f64 {
        self.shortest
    }

    pub fn basis(&self) -> ([f64; 2], [f64; 2]) {
        (self.v1, self.v2)
    }

    /// Distinct `|ξ|²` over the dual lattice `2πΛ*` up to `max`, with multiplicities.
    pub fn dual_norms(&self, max: f64) -> Vec<(f64, usize)> {
        if max < 0.0 {
            return Vec::new();
        }
        let sh = Shells::enumerate(self.dual[0], self.dual[1], max.sqrt(), true);
        sh.norms.into_iter().zip(sh.counts).collect()
    }

    fn base_time(&self) -> f64 {
        self.shortest * self.shortest / 144.0
    }

    fn bin_for(&self, lambda: f64) -> Arc<EwaldBin> {
        let t0 = self.base_time();
        let (key, t) = if lambda < 2.0 / t0 {
            (i32::MIN, t0)
        } else {
            let b = lambda.log2().floor() as i32;
            (b, t0.min(0.5f64.powi(b)))
        };
        if let Some(bin) = self.bins.lock().get(&key) {
            return bin.clone();
        }
        let top = if key == i32::MIN {
            2.0 / t0
        } else {
            2f64.powi(key + 1)
        };
        let nmax = top + DUAL_CUTOFF / t;
        let sh = Shells::enumerate(self.dual[0], self.dual[1], nmax.sqrt(), true);
        let weights = sh
            .norms
            .iter()
            .zip(&sh.counts)
            .map(|(&n, &m)| m as f64 * (-n * t).exp() / self.area)
            .collect();
        let bin = Arc::new(EwaldBin {
            t,
            norms: sh.norms,
            weights,
        });
        self.bins.lock().entry(key).or_insert(bin).clone()
    }

    /// `(S₀₀(λ), dS₀₀/dλ)`.
    pub fn s00_with_derivative(&self, lambda: f64) -> Result<(f64, f64)> {
        if !lambda.is_finite() {
            return Err(Error::domain(
                "torus S-matrix",
                "lambda",
                lambda,
                "must be finite",
            ));
        }
        let key = lambda.to_bits();
        if let Some(v) = self.values.lock().get(&key) {
            return Ok(*v);
        }
        let v = if lambda < 0.0 && (-lambda).sqrt() * self.shortest >= 1.0 {
            self.image_sum(lambda)?
        } else {
            self.ewald(lambda)?
        };
        let mut cache = self.values.lock();
        if cache.len() >= VALUE_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, v);
        Ok(v)
    }

    fn image_sum(&self, lambda: f64) -> Result<(f64, f64)> {
        let kappa = (-lambda).sqrt();
        let mut s = kappa.ln() - LN2_MINUS_GAMMA;
        let mut ds = 0.5 / lambda;
        for (&n2, &m) in self.images.norms.iter().zip(&self.images.counts) {
            let r = n2.sqrt();
            let x = kappa * r;
            if x > IMAGE_CUTOFF {
                break;
            }
            let k0 = bessel_ik_scaled(0.0, x)?.k * (-x).exp();
            let k1 = bessel_ik_scaled(1.0, x)?.k * (-x).exp();
            s -= m as f64 * k0;
            // d/dλ K₀(κr) = K₁(κr)·r/(2κ)
            ds -= m as f64 * k1 * r / (2.0 * kappa);
        }
        Ok((s, ds))
    }

    fn ewald(&self, lambda: f64) -> Result<(f64, f64)> {
        let bin = self.bin_for(lambda);
        let t = bin.t;
        let z = lambda * t;
        // E(z) = Σ zⁿ/(n·n!) and E'(z) = (e^z − 1)/z
        let mut e = 0.0;
        let mut term = 1.0;
        for n in 1..200 {
            term *= z / n as f64;
            let add = term / n as f64;
            e += add;
            if add.abs() < 1e-17 * e.abs().max(1e-300) {
                break;
            }
        }
        let de_dl = if z.abs() < 1e-8 {
            t * (1.0 + 0.5 * z)
        } else {
            z.exp_m1() / lambda
        };
        let growth = z.exp();
        let tol = 1e-12 * (1.0 + lambda.abs());
        let mut sum = 0.0;
        let mut dsum = 0.0;
        let start = bin.norms.partition_point(|&n| n < lambda - tol);
        if bin
            .norms
            .get(start)
            .is_some_and(|&n| (n - lambda).abs() <= tol)
            || (start > 0 && (bin.norms[start - 1] - lambda).abs() <= tol)
        {
            return Err(Error::Pole {
                function: "torus S-matrix",
                at: lambda,
            });
        }
        for (&n, &w) in bin.norms.iter().zip(&bin.weights) {
            if (n - lambda) * t > DUAL_CUTOFF && n > lambda {
                break;
            }
            let g = 1.0 / (n - lambda);
            let wt = w * growth;
            sum += wt * g;
            dsum += wt * (t * g + g * g);
        }
        let m = (e - EULER_GAMMA + (4.0 * t).ln()) / (4.0 * PI) + sum;
        let dm = de_dl / (4.0 * PI) + dsum;
        Ok((-2.0 * PI * m, -2.0 * PI * dm))
    }

    /// `S₀₀(λ₀) − (λ−λ₀)(2π/A) Σ_ξ 1/((|ξ|²−λ)(|ξ|²−λ₀))`, truncated at `|ξ|² ≤ nmax`.
    ///
    /// Slowly convergent; provided as an independent check of the Ewald form.
    pub fn s00_subtracted(&self, lambda: f64, lambda0: f64, nmax: f64) -> Result<f64> {
        let (s0, _) = self.s00_with_derivative(lambda0)?;
        let mut acc = 0.0;
        for (n, m) in self.dual_norms(nmax) {
            acc += m as f64 / ((n - lambda) * (n - lambda0));
        }
        Ok(s0 - (lambda - lambda0) * 2.0 * PI / self.area * acc)
    }
}

/// Length of the shortest nonzero lattice vector by Gauss reduction.
fn shortest_vector(mut u: [f64; 2], mut v: [f64; 2]) -> f64 {
    let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
    if dot(u, u) > dot(v, v) {
        std::mem::swap(&mut u, &mut v);
    }
    loop {
        let mu = (dot(u, v) / dot(u, u)).round();
        v = [v[0] - mu * u[0], v[1] - mu * u[1]];
        if dot(v, v) >= dot(u, u) {
            return dot(u, u).sqrt();
        }
        std::mem::swap(&mut u, &mut v);
    }
}

/// Torus with one 2π marked point; a single log channel.
#[derive(Clone, Debug)]
pub struct TorusModel {
    lattice: TorusLattice,
    cs: ChannelSet,
}

impl TorusModel {
    pub fn new(lattice: TorusLattice) -> Self {
        Self {
            lattice,
            cs: ChannelSet::new(&[2.0 * PI]).expect("2π is a valid angle"),
        }
    }

    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }
}

impl SpectralModel for TorusModel {
    fn channel_set(&self) -> &ChannelSet {
        &self.cs
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            negative_lambda: true,
            supports_positive_lambda: true,
            has_s0_log_channel: false,
            has_spectrum: true,
            analytic_derivative: true,
        }
    }

    fn s_matrix(&self, lambda: f64) -> Result<CMatrix> {
        let (s, _) = self.lattice.s00_with_derivative(lambda)?;
        Ok(CMatrix::from_element(1, 1, Complex64::new(s, 0.0)))
    }

    fn s_matrix_derivative(&self, lambda: f64) -> Result<CMatrix> {
        let (_, d) = self.lattice.s00_with_derivative(lambda)?;
        Ok(CMatrix::from_element(1, 1, Complex64::new(d, 0.0)))
    }

    fn s_matrix_at_zero(&self) -> Result<ZeroLimit> {
        // the constant eigenfunction puts a pole at λ = 0
        Ok(ZeroLimit {
            values: CMatrix::zeros(1, 1),
            defined: vec![vec![false]],
        })
    }

    fn friedrichs_eigenvalues(&self, max: f64) -> Result<SpectrumList> {
        let entries = self
            .lattice
            .dual_norms(max)
            .into_iter()
            .map(|(value, multiplicity)| SpectrumEntry {
                value,
                multiplicity,
                sector: 0,
            })
            .collect();
        SpectrumList::new(entries, max)
    }

    fn coupled_friedrichs_eigenvalues(&self, channels: &[usize], max: f64) -> Result<SpectrumList> {
        if channels.contains(&0) {
            self.friedrichs_eigenvalues(max)
        } else {
            SpectrumList::new(Vec::new(), max)
        }
    }

    fn friedrichs_kernel_dim(&self) -> usize {
        1
    }

    fn description(&self) -> ModelSpec {
        ModelSpec::Torus {
            v1: self.lattice.v1,
            v2: self.lattice.v2,
        }
    }
}
