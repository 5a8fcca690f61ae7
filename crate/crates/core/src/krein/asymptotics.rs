use num_complex::Complex64;
use serde::Serialize;

use super::determinant::{check_compatible, d_raw, log_near};
use crate::channels::{is_regular, require_valid, ChannelSet, ExtensionBC};
use crate::error::{Error, Result};
use crate::linalg::det;
use crate::models::{cone_leading, LeadingTerm, SpectralModel};
use crate::numerics::extrapolate::richardson;
use crate::specfun::LN2_MINUS_GAMMA;

const MAX_EXPANSION_COLUMNS: usize = 20;
const EXPONENT_TOL: f64 = 1e-12;
const GAMMA_T0: f64 = 400.0;
const GAMMA_STEPS: usize = 10;
const GAMMA_TOL: f64 = 1e-8;

/// Leading behaviour `D(−t) ~ a₀ · t^{α₀} · (ln t)^{l₀}` as `t → ∞`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticExponents {
    pub alpha0: f64,
    pub l0: u32,
    pub leading_coefficient: Complex64,
    /// Exponents with a nonvanishing coefficient, decreasing.
    pub exponents: Vec<f64>,
}

/// `α₀`, `l₀`, `Γ` and the regularity flag of an extension on a model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticData {
    pub alpha0: f64,
    pub l0: u32,
    pub gamma: Option<Complex64>,
    pub regular: bool,
}

struct Group {
    exponent: f64,
    /// Coefficients of a polynomial in `L = ln t`.
    poly: Vec<Complex64>,
    scale: f64,
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Expands `det(P + Q·diag(s_j(−t)))` with the cone leading terms of every
/// channel and reads off the dominant exponent and log power.
pub fn asymptotic_exponents(bc: &ExtensionBC, cs: &ChannelSet) -> Result<AsymptoticExponents> {
    require_valid(bc)?;
    let n = bc.n();
    if n != cs.len() {
        return Err(Error::DimensionMismatch(format!(
            "bc has n = {n}, channel set has {}",
            cs.len()
        )));
    }
    let cols: Vec<usize> = (0..n)
        .filter(|&j| bc.q.column(j).iter().any(|z| z.norm() > 0.0))
        .collect();
    if cols.len() > MAX_EXPANSION_COLUMNS {
        return Err(Error::Unsupported(format!(
            "asymptotic expansion over {} coupled channels",
            cols.len()
        )));
    }
    let leading: Vec<LeadingTerm> = cols
        .iter()
        .map(|&j| cone_leading(cs.channel(j).nu))
        .collect::<Result<_>>()?;
    let mut groups: Vec<Group> = Vec::new();
    for mask in 0u32..(1u32 << cols.len()) {
        let mut m = bc.p.clone();
        let mut exponent = 0.0;
        let mut coef = Complex64::new(1.0, 0.0);
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        for (b, &j) in cols.iter().enumerate() {
            if mask & (1 << b) == 0 {
                continue;
            }
            m.set_column(j, &bc.q.column(j));
            match leading[b] {
                LeadingTerm::Power {
                    coef: c,
                    exponent: a,
                } => {
                    coef *= c;
                    exponent += a;
                }
                LeadingTerm::Log => {
                    poly = poly_mul(
                        &poly,
                        &[
                            Complex64::new(-LN2_MINUS_GAMMA, 0.0),
                            Complex64::new(0.5, 0.0),
                        ],
                    );
                }
            }
        }
        let dm = det(&m) * coef;
        let col_scale: f64 = (0..n).map(|j| m.column(j).norm().max(1.0)).product();
        if dm.norm() <= 1e-13 * col_scale {
            continue;
        }
        let term: Vec<Complex64> = poly.iter().map(|p| p * dm).collect();
        let term_scale = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
        match groups
            .iter_mut()
            .find(|g| (g.exponent - exponent).abs() < EXPONENT_TOL)
        {
            Some(g) => {
                if g.poly.len() < term.len() {
                    g.poly.resize(term.len(), Complex64::new(0.0, 0.0));
                }
                for (k, t) in term.iter().enumerate() {
                    g.poly[k] += t;
                }
                g.scale = g.scale.max(term_scale);
            }
            None => groups.push(Group {
                exponent,
                poly: term,
                scale: term_scale,
            }),
        }
    }
    groups.sort_by(|a, b| b.exponent.total_cmp(&a.exponent));
    let alive = |g: &Group| g.poly.iter().any(|z| z.norm() > 1e-10 * g.scale);
    let lead = groups
        .first()
        .ok_or(Error::DegenerateLeading { exponent: 0.0 })?;
    if !alive(lead) {
        return Err(Error::DegenerateLeading {
            exponent: lead.exponent,
        });
    }
    let l0 = (0..lead.poly.len())
        .rev()
        .find(|&k| lead.poly[k].norm() > 1e-10 * lead.scale)
        .expect("alive group");
    Ok(AsymptoticExponents {
        alpha0: lead.exponent,
        l0: l0 as u32,
        // drop signed zeros so real negative coefficients have argument +π
        leading_coefficient: lead.poly[l0] + Complex64::new(0.0, 0.0),
        exponents: groups
            .iter()
            .filter(|g| alive(g))
            .map(|g| g.exponent)
            .collect(),
    })
}

/// Error ratios for Richardson on the grid `t₀·4ʲ` from the exponent gaps.
fn richardson_ratios(exponents: &[f64]) -> Vec<f64> {
    let gaps: Vec<f64> = exponents
        .iter()
        .skip(1)
        .map(|e| exponents[0] - e)
        .filter(|g| *g > 1e-9)
        .collect();
    let mut rates: Vec<f64> = Vec::new();
    for &a in &gaps {
        for &b in std::iter::once(&0.0).chain(&gaps) {
            for &c in std::iter::once(&0.0).chain(&gaps) {
                rates.push(a + b + c);
            }
        }
    }
    rates.sort_by(f64::total_cmp);
    rates.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    rates.truncate(4);
    rates.iter().map(|r| 4f64.powf(*r)).collect()
}

fn extrapolate(values: &[f64], ratios: &[f64]) -> (f64, f64) {
    let n = values.len();
    let last = (values[n - 1] - values[n - 2]).abs();
    if last < 0.1 * GAMMA_TOL || ratios.is_empty() {
        return (values[n - 1], last);
    }
    let tail = &values[n.saturating_sub(6)..];
    richardson(tail, ratios)
}

/// `Γ = lim_{t→∞} [ln D(−t) − α₀ ln t]` for a regular extension.
///
/// The imaginary part follows the branch anchored at `arg a₀`. Models
/// without `S(λ)` get `Γ = ln a₀`.
pub fn gamma_constant(bc: &ExtensionBC, model: &dyn SpectralModel) -> Result<Complex64> {
    check_compatible(bc, model)?;
    let cs = model.channel_set();
    let asym = asymptotic_exponents(bc, cs)?;
    if asym.l0 > 0 || !is_regular(bc, cs)? {
        return Err(Error::NonRegular { l0: asym.l0 });
    }
    let anchor = asym.leading_coefficient.arg();
    if !model.capabilities().negative_lambda {
        return Ok(asym.leading_coefficient.ln());
    }
    let mut re = Vec::with_capacity(GAMMA_STEPS + 1);
    let mut im = Vec::with_capacity(GAMMA_STEPS + 1);
    for j in 0..=GAMMA_STEPS {
        let t = GAMMA_T0 * 4f64.powi(j as i32);
        let l = log_near(d_raw(bc, model, -t)?, anchor);
        re.push(l.re - asym.alpha0 * t.ln());
        im.push(l.im);
    }
    let ratios = richardson_ratios(&asym.exponents);
    let (gr, er) = extrapolate(&re, &ratios);
    let (gi, ei) = extrapolate(&im, &ratios);
    if er > GAMMA_TOL || ei > GAMMA_TOL || !gr.is_finite() {
        return Err(Error::convergence(
            "gamma_constant",
            format!("successive estimates differ by {:e}", er.max(ei)),
        ));
    }
    Ok(Complex64::new(gr, gi))
}

/// [`asymptotic_exponents`] plus `Γ` when the extension is regular.
pub fn asymptotic_data(bc: &ExtensionBC, model: &dyn SpectralModel) -> Result<AsymptoticData> {
    check_compatible(bc, model)?;
    let asym = asymptotic_exponents(bc, model.channel_set())?;
    let regular = is_regular(bc, model.channel_set())?;
    let gamma = match gamma_constant(bc, model) {
        Ok(g) => Some(g),
        Err(Error::NonRegular { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(AsymptoticData {
        alpha0: asym.alpha0,
        l0: asym.l0,
        gamma,
        regular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{friedrichs_bc, rotation_bc_on, ChannelId};
    use crate::models::{TorusLattice, TorusModel, TruncatedCone};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn friedrichs_has_trivial_asymptotics() {
        let m = TruncatedCone::new(3.0 * PI, 1.0).unwrap();
        let bc = friedrichs_bc(m.channel_set());
        let a = asymptotic_exponents(&bc, m.channel_set()).unwrap();
        assert_eq!((a.alpha0, a.l0), (0.0, 0));
        assert_eq!(gamma_constant(&bc, &m).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn half_channel_gamma_is_i_pi() {
        let m = TruncatedCone::new(4.0 * PI, 1.0).unwrap();
        let bc = rotation_bc_on(
            m.channel_set(),
            &[(ChannelId { point: 0, k: 1 }, FRAC_PI_2)],
        )
        .unwrap();
        let a = asymptotic_exponents(&bc, m.channel_set()).unwrap();
        assert_eq!((a.alpha0, a.l0), (0.5, 0));
        let g = gamma_constant(&bc, &m).unwrap();
        assert!(g.re.abs() < 1e-10 && (g.im - PI).abs() < 1e-10, "{g}");
    }

    #[test]
    fn rotated_channel_needs_richardson() {
        // ln(cos θ − sin θ κ coth κ) − ½ ln t → ln sin θ + iπ with t^{−1/2} corrections
        let m = TruncatedCone::new(4.0 * PI, 1.0).unwrap();
        let theta = 1.0;
        let bc = rotation_bc_on(m.channel_set(), &[(ChannelId { point: 0, k: 1 }, theta)]).unwrap();
        let g = gamma_constant(&bc, &m).unwrap();
        assert!(
            (g.re - theta.sin().ln()).abs() < 1e-8 && (g.im - PI).abs() < 1e-8,
            "{g}"
        );
    }

    #[test]
    fn torus_is_not_regular() {
        let m = TorusModel::new(TorusLattice::unit_square());
        let bc = rotation_bc_on(
            m.channel_set(),
            &[(ChannelId { point: 0, k: 0 }, FRAC_PI_2)],
        )
        .unwrap();
        let a = asymptotic_exponents(&bc, m.channel_set()).unwrap();
        assert_eq!((a.alpha0, a.l0), (0.0, 1));
        assert!((a.leading_coefficient.re - 0.5).abs() < 1e-15);
        assert_eq!(gamma_constant(&bc, &m), Err(Error::NonRegular { l0: 1 }));
    }

    #[test]
    fn paired_half_channels() {
        let cs = ChannelSet::new(&[4.0 * PI]).unwrap();
        let theta = 0.7;
        let bc = crate::channels::rotation_bc(&cs, &[theta, 0.0, theta]).unwrap();
        let a = asymptotic_exponents(&bc, &cs).unwrap();
        assert_eq!((a.alpha0, a.l0), (1.0, 0));
        assert!((a.leading_coefficient.re - theta.sin().powi(2)).abs() < 1e-14);
        assert_eq!(a.exponents, vec![1.0, 0.5, 0.0]);
    }
}
