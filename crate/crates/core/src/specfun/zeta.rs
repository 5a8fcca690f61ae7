//! Riemann zeta on the real line by Euler–Maclaurin summation.

use super::gamma::EULER_GAMMA;
use crate::error::{Error, Result};

const N_DIRECT: usize = 24;

/// `B_{2k} / (2k)!` for k = 1..=12.
const B2K_OVER_FACT: [f64; 12] = [
    8.333_333_333_333_333e-2,
    -1.388_888_888_888_888_9e-3,
    3.306_878_306_878_306_9e-5,
    -8.267_195_767_195_767_2e-7,
    2.087_675_698_786_809_9e-8,
    -5.284_190_138_687_493_2e-10,
    1.338_253_653_068_467_9e-11,
    -3.389_680_296_322_582_9e-13,
    8.586_062_056_277_844_6e-15,
    -2.174_868_698_558_061_9e-16,
    5.509_002_828_360_229_5e-18,
    -1.395_446_468_581_252_3e-19,
];

/// Stieltjes constant γ₁.
const STIELTJES_1: f64 = -0.072_815_845_483_676_72;

/// `(ζ(s), ζ'(s))` for real `s ≠ 1`.
pub fn riemann_zeta_with_derivative(s: f64) -> Result<(f64, f64)> {
    if !s.is_finite() {
        return Err(Error::domain(
            "riemann_zeta",
            "s",
            s,
            "argument must be finite",
        ));
    }
    if s == 1.0 {
        return Err(Error::Pole {
            function: "riemann_zeta",
            at: 1.0,
        });
    }
    let n = N_DIRECT as f64;
    let ln_n = n.ln();
    let mut z = 0.0;
    let mut dz = 0.0;
    for k in 1..N_DIRECT {
        let kf = k as f64;
        let t = kf.powf(-s);
        z += t;
        dz -= kf.ln() * t;
    }
    let n1s = n.powf(1.0 - s);
    z += n1s / (s - 1.0) + 0.5 * n.powf(-s);
    dz += -ln_n * n1s / (s - 1.0) - n1s / ((s - 1.0) * (s - 1.0)) - 0.5 * ln_n * n.powf(-s);
    // rising product s(s+1)...(s+2k-2) and its s-derivative
    let mut p = s;
    let mut dp = 1.0;
    for (k, c) in B2K_OVER_FACT.iter().enumerate() {
        let pow = n.powf(-s - (2 * k + 1) as f64);
        z += c * p * pow;
        dz += c * pow * (dp - ln_n * p);
        let a = s + (2 * k + 1) as f64;
        let b = s + (2 * k + 2) as f64;
        dp = dp * a * b + p * (a + b);
        p *= a * b;
    }
    Ok((z, dz))
}

pub fn riemann_zeta(s: f64) -> Result<f64> {
    Ok(riemann_zeta_with_derivative(s)?.0)
}

/// `(2^{u+1} − 2)·ζ(u+1)` and its u-derivative, finite across `u = 0`.
pub(crate) fn damped_zeta_near_one(u: f64) -> Result<(f64, f64)> {
    let l2 = std::f64::consts::LN_2;
    if u.abs() < 1e-4 {
        // 2(2^u − 1)(1/u + γ − γ₁u)
        let e = u * l2;
        let a = l2 * (1.0 + e / 2.0 + e * e / 6.0);
        let b = 1.0 + EULER_GAMMA * u - STIELTJES_1 * u * u;
        let da = l2 * l2 * (0.5 + e / 3.0);
        let db = EULER_GAMMA - 2.0 * STIELTJES_1 * u;
        return Ok((2.0 * a * b, 2.0 * (da * b + a * db)));
    }
    let (z, dz) = riemann_zeta_with_derivative(1.0 + u)?;
    let f = 2f64.powf(u + 1.0) - 2.0;
    Ok((f * z, l2 * 2f64.powf(u + 1.0) * z + f * dz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn special_values() {
        assert!((riemann_zeta(0.0).unwrap() + 0.5).abs() < 1e-14);
        assert!((riemann_zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(-1.0).unwrap() + 1.0 / 12.0).abs() < 1e-14);
        // ζ'(0) = −ln(2π)/2
        let (_, d0) = riemann_zeta_with_derivative(0.0).unwrap();
        assert!((d0 + 0.5 * (2.0 * PI).ln()).abs() < 1e-13);
        assert!(riemann_zeta(1.0).is_err());
    }

    #[test]
    fn derivative_matches_difference() {
        for s in [-0.5, 0.3, 0.9, 1.2, 3.0] {
            let h = 1e-5;
            let fd = (riemann_zeta(s + h).unwrap() - riemann_zeta(s - h).unwrap()) / (2.0 * h);
            let (_, d) = riemann_zeta_with_derivative(s).unwrap();
            assert!((fd - d).abs() < 1e-8 * (1.0 + d.abs()), "s={s}");
        }
    }

    #[test]
    fn damped_zeta_is_smooth_at_one() {
        let (v0, _) = damped_zeta_near_one(0.0).unwrap();
        assert!((v0 - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
        // series branch against direct summation at the same point
        let u = 2e-4;
        let (z, _) = riemann_zeta_with_derivative(1.0 + u).unwrap();
        let direct = (2f64.powf(1.0 + u) - 2.0) * z;
        let e = u * std::f64::consts::LN_2;
        let series = 2.0
            * std::f64::consts::LN_2
            * (1.0 + e / 2.0 + e * e / 6.0)
            * (1.0 + EULER_GAMMA * u - STIELTJES_1 * u * u);
        assert!((direct - series).abs() < 1e-10);
    }
}
