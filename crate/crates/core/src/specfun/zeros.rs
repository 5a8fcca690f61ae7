use super::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::numerics::roots::brent;

const SCAN_STEP: f64 = 0.1;
const ZERO_TOL: f64 = 1e-13;

/// First `n` positive zeros of `J_ν`, strictly increasing.
///
/// Zeros are bracketed by a sign-change scan and polished with Brent's
/// method. Works for any real `ν > -1`.
pub fn bessel_j_zeros(nu: f64, n: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    scan_zeros(nu, |_, count| count >= n, &mut out)?;
    Ok(out)
}

/// All positive zeros of `J_ν` not exceeding `xmax`.
pub fn bessel_j_zeros_below(nu: f64, xmax: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    if xmax <= nu.max(0.0) {
        return Ok(out);
    }
    scan_zeros(nu, |x, _| x > xmax, &mut out)?;
    while out.last().is_some_and(|&z| z > xmax) {
        out.pop();
    }
    Ok(out)
}

fn scan_zeros(nu: f64, mut done: impl FnMut(f64, usize) -> bool, out: &mut Vec<f64>) -> Result<()> {
    if !(nu > -1.0) || !nu.is_finite() {
        return Err(Error::domain(
            "bessel_j_zeros",
            "nu",
            nu,
            "requires finite nu > -1",
        ));
    }
    // J_ν has no zeros in (0, ν] for ν ≥ 0; for -1 < ν < 0 the first zero
    // approaches 0 as ν → -1.
    let mut a = if nu >= 0.0 {
        nu.max(1e-3)
    } else {
        0.5 * (0.1f64).min(2.0 * (1.0 + nu).sqrt())
    };
    let step_for = |x: f64| {
        if x < 1.0 && nu < 0.0 {
            SCAN_STEP.min(0.5 * x)
        } else {
            SCAN_STEP
        }
    };
    let mut fa = bessel_j(nu, a)?;
    loop {
        if done(a, out.len()) {
            return Ok(());
        }
        let b = a + step_for(a);
        let fb = bessel_j(nu, b)?;
        if fa == 0.0 {
            out.push(a);
        } else if fa * fb < 0.0 {
            let z = brent(|x| bessel_j(nu, x).unwrap_or(f64::NAN), a, b, ZERO_TOL, 200)?;
            out.push(z);
        }
        a = b;
        fa = fb;
    }
}
