//! Relative heat trace and relative zeta function of two eigenvalue lists.
//!
//! For lists `{μ_j}` (`Δ_L`) and `{λ_j}` (`Δ_F`) that differ only near the
//! bottom, `θ(t) = Σ e^{−tμ_j} − Σ e^{−tλ_j}` tends to a constant `α₀` as
//! `t → 0` and
//!
//! ```text
//! ζ(s) = Σ (μ_j − λ̃)^{−s} − Σ (λ_j − λ̃)^{−s}
//!      = Γ(s)⁻¹ [ ∫₀¹ t^{s−1} e^{λ̃t} (θ − α₀) dt + α₀ Σₙ λ̃ⁿ/(n!(n+s)) + ∫₁^∞ t^{s−1} e^{λ̃t} θ dt ].
//! ```
//!
//! Zero eigenvalues are split off exactly, so `exp(−ζ′(0))` extrapolated to
//! `λ̃ → 0` is the ratio of modified determinants.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::SpectrumList;
use crate::numerics::extrapolate::neville_at_zero;
use crate::numerics::quadrature::{integrate, integrate_to_infinity, QuadOptions};
use crate::specfun::{damped_zeta_near_one, gamma_fn, riemann_zeta_with_derivative, EULER_GAMMA};

const TAIL_LIMIT: f64 = 1e-10;
const SMALL_T_TAIL: f64 = 1e-13;
const FIT_POINTS: usize = 16;
const FIT_TERMS: usize = 7;
const FIT_SPAN: f64 = 32.0;
const FIT_RESIDUAL_LIMIT: f64 = 1e-8;
const ZERO_MODE_TOL: f64 = 1e-10;
const MAX_SMALL_T: f64 = 0.05;

/// Shifts used by [`relative_zeta_extrapolated`].
pub const DEFAULT_SHIFTS: [f64; 3] = [-1e-2, -1e-3, -1e-4];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeatTrace {
    pub value: f64,
    pub tail_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelZetaDiagnostics {
    pub eigenvalues_l: usize,
    pub eigenvalues_f: usize,
    /// Below this `t` the trace is replaced by its fitted expansion.
    pub small_t_cutoff: f64,
    pub tail_bound: f64,
    /// `θ(t) ≈ Σ_k c_k t^{k/2}` near `t = 0`; `c₀ = α₀`.
    pub small_t_fit: Vec<f64>,
    pub fit_residual: f64,
    /// Zero modes of `Δ_L` minus zero modes of `Δ_F`.
    pub kernel_difference: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelZetaResult {
    pub zeta_at_zero: f64,
    pub zeta_prime_at_zero: f64,
    /// `exp(−ζ′(0))`.
    pub det_ratio: f64,
    /// Shifts `λ̃` evaluated; more than one means the values are extrapolated to 0.
    pub shifts: Vec<f64>,
    pub diagnostics: RelZetaDiagnostics,
}

/// Eigenvalue lists with zero modes removed.
struct Pair {
    l: Vec<(f64, f64)>,
    f: Vec<(f64, f64)>,
    zeros: i64,
    cutoff: f64,
    density: f64,
}

impl Pair {
    fn new(mu_l: &SpectrumList, mu_f: &SpectrumList) -> Self {
        let split = |s: &SpectrumList| -> (Vec<(f64, f64)>, i64) {
            let mut out = Vec::new();
            let mut zeros = 0;
            for e in s.entries() {
                if e.value.abs() <= ZERO_MODE_TOL {
                    zeros += e.multiplicity as i64;
                } else {
                    out.push((e.value, e.multiplicity as f64));
                }
            }
            (out, zeros)
        };
        let (l, zl) = split(mu_l);
        let (f, zf) = split(mu_f);
        let cutoff = mu_l.complete_below.min(mu_f.complete_below);
        let count = |v: &[(f64, f64)]| v.iter().filter(|e| e.0 <= cutoff).map(|e| e.1).sum::<f64>();
        // density bound 2N/Λ per list
        let density = if cutoff > 0.0 {
            2.0 * (count(&l) + count(&f)) / cutoff
        } else {
            0.0
        };
        Self {
            l,
            f,
            zeros: zl - zf,
            cutoff,
            density,
        }
    }

    fn min_value(&self) -> f64 {
        self.l
            .iter()
            .chain(&self.f)
            .map(|e| e.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Trace over nonzero eigenvalues below the common cutoff.
    fn theta(&self, t: f64) -> f64 {
        let part = |v: &[(f64, f64)]| {
            let mut s = 0.0;
            for &(x, m) in v {
                if x > self.cutoff {
                    break;
                }
                let e = (-t * x).exp();
                if e < 1e-300 {
                    break;
                }
                s += m * e;
            }
            s
        };
        part(&self.l) - part(&self.f)
    }

    fn tail_bound(&self, t: f64) -> f64 {
        if !self.cutoff.is_finite() {
            return 0.0;
        }
        self.density * (-t * self.cutoff).exp() / t
    }
}

pub fn relative_heat_trace(mu_l: &SpectrumList, mu_f: &SpectrumList, t: f64) -> Result<HeatTrace> {
    if !(t > 0.0) {
        return Err(Error::domain(
            "relative_heat_trace",
            "t",
            t,
            "t must be positive",
        ));
    }
    let pair = Pair::new(mu_l, mu_f);
    let tail_bound = pair.tail_bound(t);
    if tail_bound > TAIL_LIMIT {
        return Err(Error::InsufficientTruncation {
            tail_bound,
            limit: TAIL_LIMIT,
        });
    }
    Ok(HeatTrace {
        value: pair.theta(t) + pair.zeros as f64,
        tail_bound,
    })
}

/// Small-`t` model of the trace over nonzero eigenvalues.
struct SmallT {
    cutoff: f64,
    fit: Vec<f64>,
    residual: f64,
}

fn small_t(pair: &Pair) -> Result<SmallT> {
    // smallest t at which the truncation is still negligible
    let mut t = 40.0 / pair.cutoff;
    while pair.tail_bound(t) > SMALL_T_TAIL {
        t *= 1.25;
    }
    // the whole fit window has to sit in the small-t regime
    if !t.is_finite() || t * FIT_SPAN > MAX_SMALL_T {
        return Err(Error::InsufficientTruncation {
            tail_bound: pair.tail_bound(MAX_SMALL_T / FIT_SPAN),
            limit: SMALL_T_TAIL,
        });
    }
    let top = t * FIT_SPAN;
    let ts: Vec<f64> = (0..FIT_POINTS)
        .map(|j| t * FIT_SPAN.powf(j as f64 / (FIT_POINTS - 1) as f64))
        .collect();
    let ys: Vec<f64> = ts.iter().map(|&x| pair.theta(x)).collect();
    // columns in (√(t/top))^k keep the system well scaled
    let a = DMatrix::from_fn(FIT_POINTS, FIT_TERMS, |i, j| {
        (ts[i] / top).powf(0.5 * j as f64)
    });
    let b = DVector::from_vec(ys.clone());
    let sol = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::convergence("relative_zeta", format!("small-t fit failed: {e}")))?;
    let residual = (&a * &sol - &b).amax();
    if residual > FIT_RESIDUAL_LIMIT {
        return Err(Error::convergence(
            "relative_zeta",
            format!(
                "relative heat trace has no constant small-t limit (fit residual {residual:e}); \
                 the extension looks non-regular"
            ),
        ));
    }
    Ok(SmallT {
        cutoff: t,
        fit: (0..FIT_TERMS)
            .map(|k| sol[k] / top.powf(0.5 * k as f64))
            .collect(),
        residual,
    })
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        atol: 1e-13,
        rtol: 1e-12,
        max_subdivisions: 4000,
    }
}

/// `A(s) + C(s)` with the small-`t` part taken from the fit.
fn mellin_parts(pair: &Pair, st: &SmallT, s: f64, shift: f64) -> Result<f64> {
    let alpha = st.fit[0];
    let opts = quad_opts();
    // ∫_{t_c}^1 in u = ln t
    let a = integrate(
        |u: f64| {
            let t = u.exp();
            (s * u).exp() * (shift * t).exp() * (pair.theta(t) - alpha)
        },
        st.cutoff.ln(),
        0.0,
        &opts,
    )?
    .value;
    let tc = st.cutoff;
    let a0: f64 = (1..st.fit.len())
        .map(|k| {
            let p = s + 0.5 * k as f64;
            st.fit[k] * tc.powf(p) / p
        })
        .sum();
    let c = integrate_to_infinity(
        |t: f64| t.powf(s - 1.0) * (shift * t).exp() * pair.theta(t),
        1.0,
        &opts,
    )?
    .value;
    Ok(a + a0 + c)
}

/// `Σₙ λ̃ⁿ/(n!(n+s))` for `n ≥ 1`.
fn shift_series(shift: f64, s: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for n in 1..400 {
        term *= shift / n as f64;
        let add = term / (n as f64 + s);
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn check_shift(pair: &Pair, shift: f64) -> Result<()> {
    if !(shift < 0.0) {
        return Err(Error::domain(
            "relative_zeta",
            "shift",
            shift,
            "λ̃ must be negative",
        ));
    }
    if pair.min_value() <= shift {
        return Err(Error::domain(
            "relative_zeta",
            "shift",
            shift,
            "λ̃ must lie below both spectra",
        ));
    }
    Ok(())
}

/// `ζ(s, Δ_L − λ̃) − ζ(s, Δ_F − λ̃)`.
pub fn relative_zeta(mu_l: &SpectrumList, mu_f: &SpectrumList, s: f64, shift: f64) -> Result<f64> {
    let pair = Pair::new(mu_l, mu_f);
    check_shift(&pair, shift)?;
    let st = small_t(&pair)?;
    let zero_part = pair.zeros as f64 * (-shift).powf(-s);
    if s == 0.0 {
        return Ok(st.fit[0] + zero_part);
    }
    let rg = if s <= 0.0 && s == s.floor() {
        0.0
    } else {
        1.0 / gamma_fn(s)?
    };
    let b = 1.0 / s + shift_series(shift, s);
    Ok(rg * (mellin_parts(&pair, &st, s, shift)? + st.fit[0] * b) + zero_part)
}

/// [`relative_zeta`] extrapolated to `λ̃ → 0` from the given shifts.
pub fn relative_zeta_limit(
    mu_l: &SpectrumList,
    mu_f: &SpectrumList,
    s: f64,
    shifts: &[f64],
) -> Result<f64> {
    if shifts.len() < 2 {
        return Err(Error::Config(
            "extrapolation needs at least two shifts".into(),
        ));
    }
    let pair = Pair::new(mu_l, mu_f);
    if pair.min_value() < 0.0 {
        return Err(Error::Unsupported("λ̃ → 0 with negative eigenvalues".into()));
    }
    let ys: Vec<f64> = shifts
        .iter()
        .map(|&x| relative_zeta(mu_l, mu_f, s, x))
        .collect::<Result<_>>()?;
    Ok(neville_at_zero(shifts, &ys))
}

fn at_zero(pair: &Pair, st: &SmallT, shift: f64) -> Result<(f64, f64)> {
    let alpha = st.fit[0];
    let parts = mellin_parts(pair, st, 0.0, shift)?;
    let dz = parts + alpha * (shift_series(shift, 0.0) + EULER_GAMMA);
    Ok((
        alpha + pair.zeros as f64,
        dz - pair.zeros as f64 * (-shift).ln(),
    ))
}

/// `ζ(0)` and `ζ′(0)` at one shift `λ̃ < 0`.
pub fn relative_zeta_at_zero(
    mu_l: &SpectrumList,
    mu_f: &SpectrumList,
    shift: f64,
) -> Result<RelZetaResult> {
    let pair = Pair::new(mu_l, mu_f);
    check_shift(&pair, shift)?;
    let st = small_t(&pair)?;
    let (z, dz) = at_zero(&pair, &st, shift)?;
    Ok(RelZetaResult {
        zeta_at_zero: z,
        zeta_prime_at_zero: dz,
        det_ratio: (-dz).exp(),
        shifts: vec![shift],
        diagnostics: diagnostics(mu_l, mu_f, &pair, &st),
    })
}

/// [`relative_zeta_at_zero`] extrapolated to `λ̃ → 0` with zero modes removed,
/// so `det_ratio` compares modified determinants.
pub fn relative_zeta_extrapolated(
    mu_l: &SpectrumList,
    mu_f: &SpectrumList,
    shifts: &[f64],
) -> Result<RelZetaResult> {
    if shifts.len() < 2 {
        return Err(Error::Config(
            "extrapolation needs at least two shifts".into(),
        ));
    }
    let pair = Pair::new(mu_l, mu_f);
    if pair.min_value() < 0.0 {
        return Err(Error::Unsupported("λ̃ → 0 with negative eigenvalues".into()));
    }
    for &s in shifts {
        check_shift(&pair, s)?;
    }
    let st = small_t(&pair)?;
    let mut primes = Vec::with_capacity(shifts.len());
    for &shift in shifts {
        let (_, dz) = at_zero(&pair, &st, shift)?;
        primes.push(dz + pair.zeros as f64 * (-shift).ln());
    }
    let dz = neville_at_zero(shifts, &primes);
    Ok(RelZetaResult {
        zeta_at_zero: st.fit[0] + pair.zeros as f64,
        zeta_prime_at_zero: dz,
        det_ratio: (-dz).exp(),
        shifts: shifts.to_vec(),
        diagnostics: diagnostics(mu_l, mu_f, &pair, &st),
    })
}

fn diagnostics(
    mu_l: &SpectrumList,
    mu_f: &SpectrumList,
    pair: &Pair,
    st: &SmallT,
) -> RelZetaDiagnostics {
    RelZetaDiagnostics {
        eigenvalues_l: mu_l.total_multiplicity(),
        eigenvalues_f: mu_f.total_multiplicity(),
        small_t_cutoff: st.cutoff,
        tail_bound: pair.tail_bound(st.cutoff),
        small_t_fit: st.fit.clone(),
        fit_residual: st.residual,
        kernel_difference: pair.zeros,
    }
}

/// `π^{−2s} R^{2s} (2^{2s} − 2) ζ_R(2s)`: the relative zeta function of
/// `{((m − ½)π/R)²}` against `{(mπ/R)²}`, with its `s`-derivative.
pub fn closed_form_channel_zeta(s: f64, radius: f64) -> Result<(f64, f64)> {
    if !(radius > 0.0) {
        return Err(Error::domain(
            "closed_form_channel_zeta",
            "radius",
            radius,
            "must be positive",
        ));
    }
    let l = (radius / std::f64::consts::PI).ln();
    let pre = (2.0 * s * l).exp();
    // (2^{2s} − 2)ζ(2s), removable at s = ½
    let (g, dg) = if (2.0 * s - 1.0).abs() < 0.25 {
        let (v, dv) = damped_zeta_near_one(2.0 * s - 1.0)?;
        (v, 2.0 * dv)
    } else {
        let (z, dz) = riemann_zeta_with_derivative(2.0 * s)?;
        let f = 4f64.powf(s) - 2.0;
        (
            f * z,
            2.0 * std::f64::consts::LN_2 * 4f64.powf(s) * z + 2.0 * f * dz,
        )
    };
    Ok((pre * g, pre * (2.0 * l * g + dg)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::SpectrumEntry;
    use std::f64::consts::PI;

    fn list(values: impl Iterator<Item = f64>, complete_below: f64) -> SpectrumList {
        let entries = values
            .map(|value| SpectrumEntry {
                value,
                multiplicity: 1,
                sector: 0,
            })
            .collect();
        SpectrumList::new(entries, complete_below).unwrap()
    }

    fn half_pair(m: usize) -> (SpectrumList, SpectrumList) {
        let top = (m as f64 * PI).powi(2);
        (
            list((1..=m).map(|k| ((k as f64 - 0.5) * PI).powi(2)), top),
            list((1..=m).map(|k| (k as f64 * PI).powi(2)), top),
        )
    }

    #[test]
    fn closed_form_values() {
        let (z, dz) = closed_form_channel_zeta(0.0, 1.0).unwrap();
        assert!((z - 0.5).abs() < 1e-14 && dz.abs() < 1e-13);
        let (_, dz2) = closed_form_channel_zeta(0.0, 2.0).unwrap();
        assert!((dz2 - 2f64.ln()).abs() < 1e-13);
        // s = ½: Σ 1/(m − ½)π − 1/mπ = 2 ln 2/π
        let (h, _) = closed_form_channel_zeta(0.5, 1.0).unwrap();
        assert!((h - 2.0 * 2f64.ln() / PI).abs() < 1e-13);
    }

    #[test]
    fn identical_lists_vanish() {
        let (a, _) = half_pair(300);
        assert_eq!(relative_heat_trace(&a, &a, 0.01).unwrap().value, 0.0);
        let r = relative_zeta_at_zero(&a, &a, -0.5).unwrap();
        assert!(r.zeta_at_zero.abs() < 1e-14 && r.zeta_prime_at_zero.abs() < 1e-14);
    }

    #[test]
    fn heat_trace_limit() {
        let (l, f) = half_pair(400);
        let h = relative_heat_trace(&l, &f, 1e-4).unwrap();
        assert!((h.value - 0.5).abs() < 1e-3);
    }

    #[test]
    fn truncation_is_reported() {
        let (l, f) = half_pair(10);
        assert!(matches!(
            relative_heat_trace(&l, &f, 1e-4),
            Err(Error::InsufficientTruncation { .. })
        ));
    }

    #[test]
    fn matches_closed_form_away_from_zero() {
        let (l, f) = half_pair(400);
        for s in [-0.25, 0.5, 2.0] {
            let v = relative_zeta_limit(&l, &f, s, &DEFAULT_SHIFTS).unwrap();
            let (exact, _) = closed_form_channel_zeta(s, 1.0).unwrap();
            assert!(
                (v - exact).abs() < 1e-6 * exact.abs().max(1.0),
                "s={s}: {v} vs {exact}"
            );
        }
    }
}
