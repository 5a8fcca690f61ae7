use std::f64::consts::PI;

use conic_spectra::channels::{
    block_decompose, same_extension, validate_bc, ChannelSet, ExtensionBC,
};
use conic_spectra::krein::{d_function, spectral_shift_sweep, trace_resolvent_diff};
use conic_spectra::linalg::CMatrix;
use conic_spectra::models::{
    cone_entry, cone_entry_derivative, SpectralModel, SpectrumEntry, SpectrumList, TruncatedCone,
};
use conic_spectra::relzeta::relative_heat_trace;
use conic_spectra::specfun::bessel_j_zeros;
use num_complex::Complex64;
use proptest::prelude::*;

fn unitary(entries: &[(f64, f64)], n: usize) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |i, j| {
        let (a, b) = entries[i * n + j];
        Complex64::new(a, b)
    });
    m.qr().q()
}

/// `(U cos Θ U*, U sin Θ U*)`; angles of 0 leave `Q` rank deficient.
fn unitary_bc(entries: &[(f64, f64)], angles: &[f64]) -> ExtensionBC {
    let n = angles.len();
    let u = unitary(entries, n);
    let diag = |f: fn(f64) -> f64| {
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(f(angles[i]), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    };
    let p = &u * diag(f64::cos) * u.adjoint();
    let q = &u * diag(f64::sin) * u.adjoint();
    ExtensionBC::new(p, q).unwrap()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn bc_strategy(n: usize) -> impl Strategy<Value = ExtensionBC> {
    (
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n),
        prop::collection::vec(prop_oneof![Just(0.0), 0.1f64..3.0], n),
    )
        .prop_map(|(e, a)| unitary_bc(&e, &a))
}

fn half_lists(count: usize) -> (SpectrumList, SpectrumList) {
    let list = |f: &dyn Fn(f64) -> f64| {
        let entries = (1..=count)
            .map(|m| SpectrumEntry {
                value: f(m as f64),
                multiplicity: 1,
                sector: 1,
            })
            .collect();
        SpectrumList::new(entries, (count as f64 * PI).powi(2)).unwrap()
    };
    (
        list(&|m| ((m - 0.5) * PI).powi(2)),
        list(&|m| (m * PI).powi(2)),
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn block_decomposition_round_trips(bc in bc_strategy(4)) {
        prop_assert!(validate_bc(&bc).unwrap().valid);
        let b = block_decompose(&bc).unwrap();
        let (p, q) = b.reassemble();
        let scale = max_abs(&bc.p).max(max_abs(&bc.q));
        prop_assert!(max_abs(&(p - &b.g * &bc.p * &b.u)) < 1e-10 * scale);
        prop_assert!(max_abs(&(q - &b.g * &bc.q * &b.u)) < 1e-10 * scale);
        prop_assert!(max_abs(&(&b.l - b.l.adjoint())) < 1e-9 * max_abs(&b.l).max(1.0));
    }

    #[test]
    fn left_multiplication_keeps_the_extension(
        bc in bc_strategy(3),
        g in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
    ) {
        let g = CMatrix::from_fn(3, 3, |i, j| {
            let (a, b) = g[i * 3 + j];
            Complex64::new(a + if i == j { 3.0 } else { 0.0 }, b)
        });
        let moved = ExtensionBC::new(&g * &bc.p, &g * &bc.q).unwrap();
        prop_assert!(same_extension(&bc, &moved).unwrap());
    }

    #[test]
    fn log_derivative_matches_determinant(
        e in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        a in prop::collection::vec(0.2f64..2.9, 3),
        lambda in -30.0f64..-0.5,
    ) {
        let m = TruncatedCone::new(3.0 * PI, 1.0).unwrap();
        let cs = m.channel_set();
        // mix the first three channels, Friedrichs on the rest
        let small = unitary_bc(&e, &a);
        let n = cs.len();
        let mut p = CMatrix::identity(n, n);
        let mut q = CMatrix::zeros(n, n);
        p.view_mut((0, 0), (3, 3)).copy_from(&small.p);
        q.view_mut((0, 0), (3, 3)).copy_from(&small.q);
        let bc = ExtensionBC::new(p, q).unwrap();
        let h = 1e-4 * lambda.abs();
        let d = |x: f64| d_function(&bc, &m, x).unwrap();
        let d0 = d(lambda);
        prop_assume!(d0.norm() > 1e-6);
        let fd = (8.0 * (d(lambda + h) - d(lambda - h)) - (d(lambda + 2.0 * h) - d(lambda - 2.0 * h)))
            / (12.0 * h);
        let tr = trace_resolvent_diff(&bc, &m, lambda).unwrap();
        let want = -fd / d0;
        prop_assert!((tr - want).norm() < 1e-6 * want.norm().max(1.0), "{tr} vs {want}");
    }

    #[test]
    fn spectral_shift_is_bounded_integer(
        angles in prop::collection::vec(0.0f64..PI, 3),
        ts in prop::collection::vec(-40.0f64..400.0, 1..6),
    ) {
        let m = TruncatedCone::new(5.0 * PI, 1.0).unwrap();
        let cs = m.channel_set();
        let mut all = vec![0.0; cs.len()];
        all[..angles.len()].copy_from_slice(&angles);
        let bc = conic_spectra::channels::rotation_bc(cs, &all).unwrap();
        let xi = spectral_shift_sweep(&bc, &m, &ts);
        prop_assume!(!matches!(xi, Err(conic_spectra::Error::NearEigenvalue(_))));
        for x in xi.unwrap() {
            prop_assert_eq!(x.fract(), 0.0);
            prop_assert!(x.abs() <= angles.len() as f64);
        }
    }

    #[test]
    fn cone_entries_are_monotone(nu in prop_oneof![Just(0.0), 0.05f64..0.95], t in 0.01f64..400.0) {
        let d = cone_entry_derivative(nu, -t).unwrap();
        // power channels increase in λ, the log channel decreases
        let increasing = nu != 0.0;
        prop_assert_eq!(d > 0.0, increasing);
        let h = 1e-5 * t;
        let fd = (cone_entry(nu, -t + h).unwrap() - cone_entry(nu, -t - h).unwrap()) / (2.0 * h);
        prop_assert!((d - fd).abs() < 1e-5 * d.abs());
    }

    #[test]
    fn bessel_zeros_interlace(nu in 0.0f64..6.0) {
        let a = bessel_j_zeros(nu, 12).unwrap();
        let b = bessel_j_zeros(nu + 1.0, 12).unwrap();
        for k in 0..11 {
            prop_assert!(a[k] < b[k] && b[k] < a[k + 1]);
        }
    }

    #[test]
    fn half_channel_heat_trace_is_monotone(t in 0.02f64..4.0) {
        let (l, f) = half_lists(400);
        let a = relative_heat_trace(&l, &f, t).unwrap().value;
        let b = relative_heat_trace(&l, &f, 1.1 * t).unwrap().value;
        prop_assert!(0.0 < b && b <= a && a < 0.5 + 1e-12);
        // below t ≈ 0.03 the gap to ½ is under one ulp
        if t > 0.05 {
            prop_assert!(b < a);
        }
    }

    #[test]
    fn spectrum_csv_round_trips(values in prop::collection::vec((0.0f64..1e4, 1usize..4), 0..20)) {
        let entries = values
            .iter()
            .map(|&(value, multiplicity)| SpectrumEntry { value, multiplicity, sector: 0 })
            .collect();
        let list = SpectrumList::new(entries, 1e4).unwrap();
        let back = SpectrumList::from_csv(&list.to_csv()).unwrap();
        prop_assert_eq!(list.expanded(), back.expanded());
    }
}

#[test]
fn channel_sets_follow_the_angle() {
    let cs = ChannelSet::new(&[4.0 * PI, 2.0 * PI]).unwrap();
    assert_eq!(cs.points().len(), 2);
    assert!(cs.log_channels().count() == 2);
}
