use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::channels::{require_valid, ExtensionBC};
use crate::error::{Error, Result};
use crate::linalg::{det, CMatrix};
use crate::models::SpectralModel;

const MAX_TRACK_EVALUATIONS: usize = 200_000;

pub(crate) fn check_compatible(bc: &ExtensionBC, model: &dyn SpectralModel) -> Result<()> {
    require_valid(bc)?;
    let n = model.channel_set().len();
    if bc.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "bc has n = {}, model has {n} channels",
            bc.n()
        )));
    }
    Ok(())
}

/// `P + Q·S`.
pub(crate) fn secular_matrix(bc: &ExtensionBC, s: &CMatrix) -> CMatrix {
    &bc.p + &bc.q * s
}

pub(crate) fn d_raw(bc: &ExtensionBC, model: &dyn SpectralModel, lambda: f64) -> Result<Complex64> {
    Ok(det(&secular_matrix(bc, &model.s_matrix(lambda)?)))
}

/// `D′/D = Tr((P + QS)⁻¹ Q Ṡ)`.
pub(crate) fn log_derivative_raw(
    bc: &ExtensionBC,
    model: &dyn SpectralModel,
    lambda: f64,
) -> Result<Complex64> {
    let m = secular_matrix(bc, &model.s_matrix(lambda)?);
    if m.nrows() == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rhs = &bc.q * model.s_matrix_derivative(lambda)?;
    let x = m.lu().solve(&rhs).ok_or(Error::NearEigenvalue(lambda))?;
    let tr = x.trace();
    if !tr.re.is_finite() || !tr.im.is_finite() {
        return Err(Error::NearEigenvalue(lambda));
    }
    Ok(tr)
}

/// The Krein determinant `D(λ) = det(P + Q·S(λ))`.
pub fn d_function(bc: &ExtensionBC, model: &dyn SpectralModel, lambda: f64) -> Result<Complex64> {
    check_compatible(bc, model)?;
    d_raw(bc, model, lambda)
}

/// `Tr((Δ_L − λ)⁻¹ − (Δ_F − λ)⁻¹) = −D′(λ)/D(λ)`.
pub fn trace_resolvent_diff(
    bc: &ExtensionBC,
    model: &dyn SpectralModel,
    lambda: f64,
) -> Result<Complex64> {
    check_compatible(bc, model)?;
    Ok(-log_derivative_raw(bc, model, lambda)?)
}

/// `arg(z) − reference` reduced to `(−π, π]`.
fn principal(delta: f64) -> f64 {
    let r = delta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// `ln z` on the branch whose imaginary part is closest to `near`.
pub(crate) fn log_near(z: Complex64, near: f64) -> Complex64 {
    let arg = z.arg();
    Complex64::new(z.norm().ln(), near + principal(arg - near))
}

/// `ln D(λ)` tracked continuously along `[start, end]` on the negative axis.
///
/// The imaginary part is anchored at `start` to the branch nearest
/// `anchor_arg` and refined inward so consecutive phase steps stay below
/// π/2. Where `D` itself changes sign (a real zero or pole on the path) the
/// path passes above it: `−π` across a zero, `+π` across a pole.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchedLogD {
    lambdas: Vec<f64>,
    values: Vec<Complex64>,
}

impl BranchedLogD {
    pub fn track(
        bc: &ExtensionBC,
        model: &dyn SpectralModel,
        start: f64,
        end: f64,
        anchor_arg: f64,
        initial_points: usize,
    ) -> Result<Self> {
        check_compatible(bc, model)?;
        if !(start < end) || end >= 0.0 {
            return Err(Error::Config(format!(
                "branch path needs start < end < 0, got [{start}, {end}]"
            )));
        }
        let n = initial_points.max(2);
        // geometric in |λ|
        let ratio = (end / start).ln();
        let mut targets: Vec<f64> = (0..n)
            .map(|i| start * (ratio * i as f64 / (n - 1) as f64).exp())
            .collect();
        targets[n - 1] = end;
        targets.reverse();
        targets.pop();

        let d0 = d_raw(bc, model, start)?;
        let mut lambdas = vec![start];
        let mut values = vec![log_near(d0, anchor_arg)];
        let mut evaluations = 1;
        while let Some(lb) = targets.pop() {
            let la = *lambdas.last().expect("nonempty");
            let prev = *values.last().expect("nonempty");
            let db = d_raw(bc, model, lb)?;
            evaluations += 1;
            if evaluations > MAX_TRACK_EVALUATIONS {
                return Err(Error::convergence("BranchedLogD", "too many refinements"));
            }
            let next = log_near(db, prev.im);
            if (next.im - prev.im).abs() < PI / 2.0 {
                lambdas.push(lb);
                values.push(next);
                continue;
            }
            let width = lb - la;
            if width > 1e-13 * (1.0 + la.abs()) {
                targets.push(lb);
                targets.push(la + 0.5 * width);
                continue;
            }
            // real sign change inside a vanishing interval
            let probe = d_raw(bc, model, la - 1e3 * width.max(f64::EPSILON * la.abs()))?;
            let step = if probe.norm() > db.norm().max(d_raw(bc, model, la)?.norm()) {
                -PI
            } else {
                PI
            };
            lambdas.push(lb);
            values.push(Complex64::new(
                db.norm().ln(),
                prev.im + step + principal(db.arg() - (prev.im + step)),
            ));
        }
        Ok(Self { lambdas, values })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `ln D` at the end of the path.
    pub fn end_value(&self) -> Complex64 {
        *self.values.last().expect("nonempty")
    }

    /// Largest phase step between neighbouring grid points.
    pub fn max_phase_step(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[1].im - w[0].im).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{friedrichs_bc, rotation_bc_on, ChannelId};
    use crate::models::TruncatedCone;
    use std::f64::consts::FRAC_PI_2;

    fn half_bc(model: &TruncatedCone) -> ExtensionBC {
        rotation_bc_on(
            model.channel_set(),
            &[(ChannelId { point: 0, k: 1 }, FRAC_PI_2)],
        )
        .unwrap()
    }

    #[test]
    fn friedrichs_determinant_is_one() {
        let m = TruncatedCone::new(4.0 * PI, 1.0).unwrap();
        let bc = friedrichs_bc(m.channel_set());
        assert_eq!(d_function(&bc, &m, -2.0).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(
            trace_resolvent_diff(&bc, &m, -2.0).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn half_channel_determinant() {
        let m = TruncatedCone::new(4.0 * PI, 1.0).unwrap();
        let d = d_function(&half_bc(&m), &m, -1.0).unwrap();
        assert!((d.re + 1.0 / 1f64.tanh()).abs() < 1e-13 && d.im == 0.0);
    }

    #[test]
    fn branch_stays_at_i_pi() {
        let m = TruncatedCone::new(4.0 * PI, 1.0).unwrap();
        let track = BranchedLogD::track(&half_bc(&m), &m, -1e6, -1e-4, PI, 32).unwrap();
        assert!(track.values().iter().all(|v| (v.im - PI).abs() < 1e-12));
    }

    #[test]
    fn branch_crosses_negative_eigenvalue() {
        // cos θ − sin θ·κ coth κ vanishes once on λ < 0 when cot θ > 1
        let m = TruncatedCone::new(4.0 * PI, 1.0).unwrap();
        let bc = rotation_bc_on(m.channel_set(), &[(ChannelId { point: 0, k: 1 }, 0.3)]).unwrap();
        let track = BranchedLogD::track(&bc, &m, -1e4, -1e-3, PI, 16).unwrap();
        assert!((track.values()[0].im - PI).abs() < 1e-12);
        assert!((track.end_value().im).abs() < 1e-12);
    }
}
