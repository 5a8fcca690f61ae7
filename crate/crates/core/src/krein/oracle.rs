use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::SpectrumList;

/// Eigenvalue-sum side of the trace identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSum {
    /// `Σ 1/(μ_j − λ) − Σ 1/(λ_j − λ)` including the tail estimate.
    pub value: f64,
    pub pairs: usize,
    pub tail: f64,
    pub cutoff: f64,
}

/// `Σ_j 1/(μ_j − λ) − Σ_j 1/(λ_j − λ)` over `Δ_L` eigenvalues `μ_j` and
/// `Δ_F` eigenvalues `λ_j`.
///
/// Both lists are expanded by multiplicity and paired in order; the rest is
/// estimated from the mean density of `λ_j − μ_j` over the upper half of the
/// paired range, `∫_Λ^∞ ρ dx/(x − λ)² = ρ/(Λ − λ)`.
pub fn eigenvalue_trace_sum(
    laplacian: &SpectrumList,
    friedrichs: &SpectrumList,
    lambda: f64,
) -> Result<TraceSum> {
    let l = laplacian.expanded();
    let f = friedrichs.expanded();
    let n = l.len().min(f.len());
    let mut sum = 0.0;
    for i in 0..n {
        if l[i] == lambda || f[i] == lambda {
            return Err(Error::NearEigenvalue(lambda));
        }
        sum += 1.0 / (l[i] - lambda) - 1.0 / (f[i] - lambda);
    }
    // unpaired leftovers sit at the top of the list; with a tail estimate they
    // belong to the first pair past the cutoff
    let (tail, cutoff) = if n >= 8 {
        let lo = n / 2;
        let start = 0.5 * (l[lo] + f[lo]);
        let end = 0.5 * (l[n - 1] + f[n - 1]);
        let excess: f64 = (lo..n).map(|i| f[i] - l[i]).sum();
        let rho = if end > start {
            excess / (end - start)
        } else {
            0.0
        };
        (rho / (end - lambda), end)
    } else {
        for x in &l[n..] {
            sum += 1.0 / (x - lambda);
        }
        for x in &f[n..] {
            sum -= 1.0 / (x - lambda);
        }
        (0.0, f.last().copied().unwrap_or(lambda))
    };
    Ok(TraceSum {
        value: sum + tail,
        pairs: n,
        tail,
        cutoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::SpectrumEntry;
    use std::f64::consts::PI;

    fn list(values: impl Iterator<Item = f64>) -> SpectrumList {
        let entries: Vec<_> = values
            .map(|value| SpectrumEntry {
                value,
                multiplicity: 1,
                sector: 0,
            })
            .collect();
        SpectrumList::new(entries, f64::INFINITY).unwrap()
    }

    #[test]
    fn identical_lists_cancel() {
        let a = list((1..50).map(|m| m as f64));
        let t = eigenvalue_trace_sum(&a, &a, -1.0).unwrap();
        assert_eq!(t.value, 0.0);
    }

    #[test]
    fn cos_sin_zero_series() {
        let m = 2000;
        let lap = list((1..=m).map(|k| ((k as f64 - 0.5) * PI).powi(2)));
        let fr = list((1..=m).map(|k| (k as f64 * PI).powi(2)));
        let t = eigenvalue_trace_sum(&lap, &fr, -1.0).unwrap();
        let exact = 0.5 * 1f64.tanh() - 0.5 * (1.0 / 1f64.tanh() - 1.0);
        assert!((t.value - exact).abs() < 1e-10, "{} vs {exact}", t.value);
    }
}
