//! Eigenvalues of a self-adjoint extension from the secular equation D(λ) = 0.

use conic_spectra::channels::{rotation_bc_on, ChannelId};
use conic_spectra::krein::{secular_coupled, secular_spectrum};
use conic_spectra::models::{SpectralModel, TorusLattice, TorusModel, TruncatedCone};
use std::f64::consts::{FRAC_PI_2, PI};

fn main() -> conic_spectra::Result<()> {
    let cone = TruncatedCone::new(4.0 * PI, 1.0)?;
    let bc = rotation_bc_on(
        cone.channel_set(),
        &[(ChannelId { point: 0, k: 1 }, FRAC_PI_2)],
    )?;
    let sp = secular_spectrum(&bc, &cone, 400.0)?;
    println!("truncated cone, Q = 1 on ν = ½: coupled eigenvalues vs ((m − ½)π)²");
    for (m, e) in sp.coupled.laplacian.entries().iter().enumerate() {
        let exact = ((m as f64 + 0.5) * PI).powi(2);
        println!(
            "  {:>16.12} {:>16.12} {:>9.1e}",
            e.value,
            exact,
            e.value - exact
        );
    }
    println!(
        "full spectrum below 400: {} eigenvalues",
        sp.laplacian.total_multiplicity()
    );

    let torus = TorusModel::new(TorusLattice::unit_square());
    let bc = rotation_bc_on(torus.channel_set(), &[(ChannelId { point: 0, k: 0 }, 1.0)])?;
    let c = secular_coupled(&bc, &torus, 200.0)?;
    println!("torus, angle 1 on the log channel: new levels interlace the Friedrichs ones");
    for p in &c.singular_points {
        println!(
            "  {:>16.10} {}",
            p.value,
            if p.order > 0 { "zero" } else { "pole" }
        );
    }
    Ok(())
}
