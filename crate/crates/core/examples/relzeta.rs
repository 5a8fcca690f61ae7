//! Relative zeta function from two eigenvalue lists, compared with the
//! Riemann-zeta closed form and with the Krein determinant ratio.

use conic_spectra::channels::{rotation_bc_on, ChannelId};
use conic_spectra::krein::{det_ratio, secular_coupled};
use conic_spectra::models::{SpectralModel, TruncatedCone};
use conic_spectra::relzeta::{
    closed_form_channel_zeta, relative_heat_trace, relative_zeta_extrapolated, relative_zeta_limit,
    DEFAULT_SHIFTS,
};
use std::f64::consts::PI;

fn main() -> conic_spectra::Result<()> {
    let model = TruncatedCone::new(4.0 * PI, 1.0)?;
    let bc = rotation_bc_on(
        model.channel_set(),
        &[(ChannelId { point: 0, k: 1 }, PI / 2.0)],
    )?;
    let spectra = secular_coupled(&bc, &model, 1e6)?;
    let (l, f) = (&spectra.laplacian, &spectra.friedrichs);
    println!(
        "{} and {} eigenvalues below 1e6",
        l.total_multiplicity(),
        f.total_multiplicity()
    );

    for t in [1.0, 1e-2, 1e-4] {
        println!("θ({t}) = {:.12}", relative_heat_trace(l, f, t)?.value);
    }
    for s in [-0.25, 0.5, 2.0] {
        let z = relative_zeta_limit(l, f, s, &DEFAULT_SHIFTS)?;
        println!(
            "ζ({s}) = {z:.10}, closed form {:.10}",
            closed_form_channel_zeta(s, 1.0)?.0
        );
    }
    let r = relative_zeta_extrapolated(l, f, &DEFAULT_SHIFTS)?;
    println!(
        "ζ(0) = {:.12}, ζ′(0) = {:.3e}, exp(−ζ′(0)) = {:.12}",
        r.zeta_at_zero, r.zeta_prime_at_zero, r.det_ratio
    );
    println!("Krein side: {:.12}", det_ratio(&bc, &model, None)?.ratio);
    Ok(())
}
