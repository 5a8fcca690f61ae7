/// Richardson table for a sequence with error `c₁ r₁^{-j} + c₂ r₂^{-j} + …`
/// where successive error ratios are `ratios[0], ratios[1], …`.
///
/// Returns the most extrapolated value and the difference to its
/// predecessor as an error estimate.
pub fn richardson(values: &[f64], ratios: &[f64]) -> (f64, f64) {
    assert!(!values.is_empty());
    let mut row: Vec<f64> = values.to_vec();
    let mut best = *row.last().unwrap();
    let mut err = f64::INFINITY;
    if row.len() >= 2 {
        err = (row[row.len() - 1] - row[row.len() - 2]).abs();
    }
    for r in ratios {
        if row.len() < 2 {
            break;
        }
        let next: Vec<f64> = row
            .windows(2)
            .map(|w| (r * w[1] - w[0]) / (r - 1.0))
            .collect();
        let cand = *next.last().unwrap();
        let cerr = (cand - best).abs();
        if cerr > err && next.len() < 2 {
            break;
        }
        err = cerr;
        best = cand;
        row = next;
    }
    (best, err)
}

/// Polynomial (Neville) extrapolation of samples `(x_i, y_i)` to `x = 0`.
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_power_error() {
        // a_j = 1 + 2^{-j} + 4^{-j}
        let v: Vec<f64> = (0..5)
            .map(|j| 1.0 + 0.5f64.powi(j) + 0.25f64.powi(j))
            .collect();
        let (b, _) = richardson(&v, &[2.0, 4.0]);
        assert!((b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn neville_recovers_polynomial() {
        let xs = [0.1, 0.2, 0.4];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 + 2.0 * x - x * x).collect();
        assert!((neville_at_zero(&xs, &ys) - 3.0).abs() < 1e-13);
    }
}
