//! Both sides of the determinant comparison: asymptotic constants, Γ, D*(0)
//! and the ratio e^{−Γ}·D*(0), including a kernel at λ = 0 and a refusal for
//! a non-regular extension.

use conic_spectra::channels::{rotation_bc_on, ChannelId};
use conic_spectra::krein::{asymptotic_data, d_star_zero, det_ratio};
use conic_spectra::models::{SpectralModel, TorusLattice, TorusModel, TruncatedCone};
use std::f64::consts::PI;

fn main() -> conic_spectra::Result<()> {
    let cone = TruncatedCone::new(4.0 * PI, 1.0)?;
    for theta in [PI / 2.0, 1.0, 0.3] {
        let bc = rotation_bc_on(cone.channel_set(), &[(ChannelId { point: 0, k: 1 }, theta)])?;
        let c = det_ratio(&bc, &cone, Some(-1.0))?;
        println!(
            "θ = {theta:.4}: α₀ = {}, Γ = {:.10}, D*(0) = {:.10}, ratio = {:.10}",
            asymptotic_data(&bc, &cone)?.alpha0,
            c.gamma,
            c.d_star_zero,
            c.ratio
        );
    }

    let bc = rotation_bc_on(
        cone.channel_set(),
        &[(ChannelId { point: 0, k: 1 }, PI / 4.0)],
    )?;
    let (d, dstar) = d_star_zero(&bc, &cone)?;
    println!("θ = π/4: dim ker(P + Q·S(0)) = {d}, D*(0) = {dstar:.10}");

    let torus = TorusModel::new(TorusLattice::unit_square());
    let bc = rotation_bc_on(
        torus.channel_set(),
        &[(ChannelId { point: 0, k: 0 }, PI / 2.0)],
    )?;
    let a = asymptotic_data(&bc, &torus)?;
    println!(
        "torus, Q = 1 on the log channel: α₀ = {}, l₀ = {}, regular = {}",
        a.alpha0, a.l0, a.regular
    );
    match det_ratio(&bc, &torus, None) {
        Ok(c) => println!("unexpected ratio {}", c.ratio),
        Err(e) => println!("refused: {e}"),
    }
    Ok(())
}
