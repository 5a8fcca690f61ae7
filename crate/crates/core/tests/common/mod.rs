//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use conic_spectra::models::{
    sphere_distinguished_param, SpectrumEntry, SpectrumList, SphereConfig,
};
use num_complex::Complex64;

pub fn list(values: impl IntoIterator<Item = f64>, complete_below: f64) -> SpectrumList {
    let entries = values
        .into_iter()
        .map(|value| SpectrumEntry {
            value,
            multiplicity: 1,
            sector: 0,
        })
        .collect();
    SpectrumList::new(entries, complete_below).unwrap()
}

/// `{((m − ½)π)²}` and `{(mπ)²}` for `m = 1..=count`, complete below `(count·π)²`.
pub fn half_channel_lists(count: usize) -> (SpectrumList, SpectrumList) {
    let top = (count as f64 * PI).powi(2);
    (
        list((1..=count).map(|m| ((m as f64 - 0.5) * PI).powi(2)), top),
        list((1..=count).map(|m| (m as f64 * PI).powi(2)), top),
    )
}

/// `Σ 1/(((m−½)π)² + 1) − Σ 1/((mπ)² + 1)` from the partial fractions of
/// `tanh` and `coth`.
pub fn half_channel_trace_at_minus_one() -> f64 {
    0.5 * 1f64.tanh() - 0.5 * (1.0 / 1f64.tanh() - 1.0)
}

/// Closed-form `−κ coth κ` (`λ < 0`) or `−√λ cot √λ` (`λ > 0`).
pub fn half_channel_s(lambda: f64) -> f64 {
    if lambda < 0.0 {
        let k = (-lambda).sqrt();
        -k / k.tanh()
    } else {
        let k = lambda.sqrt();
        -k / k.tan()
    }
}

fn zeta_map(cfg: &SphereConfig, z: Complex64) -> Complex64 {
    sphere_distinguished_param(cfg, z).unwrap()
}

/// Solves `ζ(z) = w` by Newton steps with a central-difference derivative.
fn invert(cfg: &SphereConfig, w: Complex64, guess: Complex64) -> Complex64 {
    let mut z = guess;
    for _ in 0..60 {
        let h = 1e-6 * z.norm().max(1e-3);
        let d = (zeta_map(cfg, z + h) - zeta_map(cfg, z - h)) / (2.0 * h);
        let step = (zeta_map(cfg, z) - w) / d;
        z -= step;
        if step.norm() < 1e-16 * z.norm().max(1e-300) {
            break;
        }
    }
    z
}

/// `−{z, ζ}(0)/6` for the numerically inverted map: Taylor coefficients of
/// `z(ζ)` by discrete Cauchy sums on a small circle.
pub fn inverted_map_s_half(cfg: &SphereConfig) -> Complex64 {
    let z0 = Complex64::new(1e-5, 0.0);
    let c = zeta_map(cfg, z0) / z0;
    let rmin = cfg
        .points()
        .iter()
        .map(|p| p.norm())
        .fold(f64::INFINITY, f64::min);
    let r = 0.1 * rmin * c.norm();
    let n = 48;
    let mut b = [Complex64::new(0.0, 0.0); 4];
    for k in 0..n {
        let w = Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64);
        let z = invert(cfg, w, w / c);
        for (m, bm) in b.iter_mut().enumerate().skip(1) {
            *bm += z * w.powi(-(m as i32)) / n as f64;
        }
    }
    let schwarzian = b[3] * 6.0 / b[1] - (b[2] / b[1]).powu(2) * 6.0;
    -schwarzian / 6.0
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
