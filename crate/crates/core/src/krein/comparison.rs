use num_complex::Complex64;
use serde::Serialize;

use super::asymptotics::gamma_constant;
use super::determinant::{check_compatible, d_raw, secular_matrix};
use super::secular::secular_coupled;
use crate::channels::ExtensionBC;
use crate::error::{Error, Result};
use crate::linalg::{det, singular_values, CMatrix};
use crate::models::SpectralModel;
use crate::numerics::extrapolate::neville_at_zero;

const KERNEL_RTOL: f64 = 1e-9;
const EXTRAPOLATION_POINTS: [f64; 3] = [-1e-2, -1e-3, -1e-4];
const EXTRAPOLATION_TOL: f64 = 1e-6;
const KERNEL_WINDOW: f64 = 1e-8;

/// Both sides of the determinant comparison for one extension.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetComparison {
    /// `dim ker(P + Q·S(0))`.
    pub d: usize,
    pub d_star_zero: Complex64,
    pub gamma: Complex64,
    /// `e^{−Γ}·D*(0)`.
    pub ratio: Complex64,
    pub delta_l: usize,
    pub delta_f: usize,
    /// `e^{−Γ}·D(λ̃)` at a caller-supplied `λ̃ < 0`.
    pub shifted: Option<(f64, Complex64)>,
    /// Net count of secular eigenvalues at 0, when the spectrum is computable.
    pub kernel_from_spectrum: Option<i64>,
}

/// Placeholder values for `S(0)` entries where no limit exists; two
/// different fillings must give the same answer.
fn fill(values: &CMatrix, defined: &[Vec<bool>], seed: f64) -> CMatrix {
    CMatrix::from_fn(values.nrows(), values.ncols(), |i, j| {
        if defined[i][j] {
            values[(i, j)]
        } else {
            Complex64::new(
                seed * (1.0 + i as f64) / (2.0 + j as f64),
                0.37 * seed + 0.11 * (i + 2 * j) as f64,
            )
        }
    })
}

fn kernel_dim(m: &CMatrix) -> usize {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return m.nrows();
    }
    sv.iter().filter(|&&s| s < KERNEL_RTOL * smax).count()
}

fn neville_complex(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let re: Vec<f64> = ys.iter().map(|z| z.re).collect();
    let im: Vec<f64> = ys.iter().map(|z| z.im).collect();
    Complex64::new(neville_at_zero(xs, &re), neville_at_zero(xs, &im))
}

/// `d = dim ker(P + Q·S(0))` and `D*(0) = lim_{λ→0⁻} D(λ)·(−λ)^{−d}`.
pub fn d_star_zero(bc: &ExtensionBC, model: &dyn SpectralModel) -> Result<(usize, Complex64)> {
    check_compatible(bc, model)?;
    let zl = model.s_matrix_at_zero()?;
    let m1 = secular_matrix(bc, &fill(&zl.values, &zl.defined, 1.3));
    let m2 = secular_matrix(bc, &fill(&zl.values, &zl.defined, -2.9));
    let (k1, k2) = (kernel_dim(&m1), kernel_dim(&m2));
    let (det1, det2) = (det(&m1), det(&m2));
    if k1 != k2 || (k1 == 0 && (det1 - det2).norm() > 1e-9 * (1.0 + det1.norm())) {
        return Err(Error::Unsupported(
            "this boundary condition needs entries of S(0) that have no limit".into(),
        ));
    }
    let d = k1;
    if !model.capabilities().negative_lambda {
        if d == 0 {
            return Ok((0, det1));
        }
        return Err(Error::Unsupported(
            "D*(0) with a kernel needs S(λ) for λ < 0".into(),
        ));
    }
    let xs: Vec<f64> = EXTRAPOLATION_POINTS.to_vec();
    let ys: Vec<Complex64> = xs
        .iter()
        .map(|&l| Ok(d_raw(bc, model, l)? * (-l).powi(-(d as i32))))
        .collect::<Result<_>>()?;
    let full = neville_complex(&xs, &ys);
    let short = neville_complex(&xs[1..], &ys[1..]);
    let scale = 1.0 + full.norm();
    if (full - short).norm() > EXTRAPOLATION_TOL * scale
        || (d == 0 && (full - det1).norm() > EXTRAPOLATION_TOL * scale)
    {
        return Err(Error::convergence(
            "d_star_zero",
            format!("extrapolations {full} and {short} (direct {det1}) disagree"),
        ));
    }
    Ok((d, full))
}

/// `e^{−Γ}·D*(0)` with the kernel data of both operators.
pub fn det_ratio(
    bc: &ExtensionBC,
    model: &dyn SpectralModel,
    shift: Option<f64>,
) -> Result<DetComparison> {
    check_compatible(bc, model)?;
    let gamma = gamma_constant(bc, model)?;
    let (d, dstar) = d_star_zero(bc, model)?;
    let delta_f = model.friedrichs_kernel_dim();
    let caps = model.capabilities();
    let kernel_from_spectrum = if caps.has_spectrum && caps.supports_positive_lambda {
        let cs = secular_coupled(bc, model, 1e-3)?;
        let near = |list: &crate::models::SpectrumList| {
            list.entries()
                .iter()
                .filter(|e| e.value.abs() <= KERNEL_WINDOW)
                .map(|e| e.multiplicity as i64)
                .sum::<i64>()
        };
        Some(near(&cs.laplacian) - near(&cs.friedrichs))
    } else {
        None
    };
    let shifted = match shift {
        Some(l) if l < 0.0 => Some((l, (-gamma).exp() * d_raw(bc, model, l)?)),
        Some(l) => return Err(Error::domain("det_ratio", "shift", l, "λ̃ must be negative")),
        None => None,
    };
    Ok(DetComparison {
        d,
        d_star_zero: dstar,
        gamma,
        ratio: (-gamma).exp() * dstar,
        delta_l: delta_f + d,
        delta_f,
        shifted,
        kernel_from_spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{friedrichs_bc, rotation_bc_on, ChannelId};
    use crate::models::{SphereConfig, SphereModel, TruncatedCone};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn half_channel_ratio_is_one() {
        let m = TruncatedCone::new(4.0 * PI, 1.0).unwrap();
        let bc = rotation_bc_on(
            m.channel_set(),
            &[(ChannelId { point: 0, k: 1 }, FRAC_PI_2)],
        )
        .unwrap();
        let c = det_ratio(&bc, &m, Some(-1.0)).unwrap();
        assert_eq!(c.d, 0);
        assert!((c.d_star_zero - Complex64::new(-1.0, 0.0)).norm() < 1e-10);
        assert!(
            (c.ratio - Complex64::new(1.0, 0.0)).norm() < 1e-8,
            "{:?}",
            c.ratio
        );
        assert_eq!(c.kernel_from_spectrum, Some(0));
    }

    #[test]
    fn friedrichs_ratio_is_one() {
        let m = TruncatedCone::new(3.0 * PI, 2.0).unwrap();
        let c = det_ratio(&friedrichs_bc(m.channel_set()), &m, None).unwrap();
        assert_eq!(c.ratio, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn hexagon_ratio_is_cot_squared() {
        let m = SphereModel::new(SphereConfig::regular_hexagon()).unwrap();
        let theta = 0.8;
        let [a, b] = m.half_channels();
        let ids = [m.channel_set().channel(a).id, m.channel_set().channel(b).id];
        let bc = rotation_bc_on(m.channel_set(), &[(ids[0], theta), (ids[1], theta)]).unwrap();
        let c = det_ratio(&bc, &m, None).unwrap();
        let cot2 = (theta.cos() / theta.sin()).powi(2);
        assert!((c.ratio.re - cot2).abs() < 1e-10 * cot2 && c.ratio.im.abs() < 1e-12);
        assert!((c.gamma.re - theta.sin().powi(2).ln()).abs() < 1e-14);
    }

    #[test]
    fn kernel_at_zero_is_detected() {
        // cos θ + sin θ·S(0) with S(0) = −1 on ν = ½ vanishes at θ = π/4
        let m = TruncatedCone::new(4.0 * PI, 1.0).unwrap();
        let bc =
            rotation_bc_on(m.channel_set(), &[(ChannelId { point: 0, k: 1 }, PI / 4.0)]).unwrap();
        let (d, dstar) = d_star_zero(&bc, &m).unwrap();
        assert_eq!(d, 1);
        // S(λ) = −1 + λ/3 + O(λ²), so D(λ)/(−λ) → −sin θ/3
        let expected = -(PI / 4.0f64).sin() / 3.0;
        assert!((dstar.re - expected).abs() < 1e-8, "{dstar}");
    }
}
