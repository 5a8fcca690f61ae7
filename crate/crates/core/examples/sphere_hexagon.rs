//! Sphere with a 4π point and six π points: the distinguished parameter,
//! S̃(0) from the Schwarzian and the determinant ratio cot²θ.

use conic_spectra::channels::rotation_bc_on;
use conic_spectra::krein::det_ratio;
use conic_spectra::models::{
    sphere_distinguished_param, sphere_s0_block, SphereConfig, SphereModel,
};
use num_complex::Complex64;

fn main() -> conic_spectra::Result<()> {
    let hexagon = SphereConfig::regular_hexagon();
    for r in [0.05, 0.1, 0.2] {
        let z = Complex64::from_polar(r, 0.3);
        let zeta = sphere_distinguished_param(&hexagon, z)?;
        println!("ζ({z:.3}) = {zeta:.10},  ζ/z = {:.10}", zeta / z);
    }
    println!("hexagon S̃(0) = {:.3e}", sphere_s0_block(&hexagon));

    let mut points = hexagon.points().to_vec();
    points[0] = Complex64::new(1.1, 0.0);
    let perturbed = SphereConfig::new(points)?;
    let s0 = sphere_s0_block(&perturbed);
    println!("perturbed S̃_½½(0) = {:.12}", s0[(1, 1)]);

    let model = SphereModel::new(hexagon)?;
    let [a, b] = model.half_channels();
    let cs = conic_spectra::models::SpectralModel::channel_set(&model);
    for theta in [0.3, 0.8, 1.2] {
        let bc = rotation_bc_on(cs, &[(cs.channel(a).id, theta), (cs.channel(b).id, theta)])?;
        let c = det_ratio(&bc, &model, None)?;
        println!(
            "θ = {theta}: ratio {:.14}, cot²θ {:.14}, Γ = {:.12}",
            c.ratio.re,
            (theta.cos() / theta.sin()).powi(2),
            c.gamma
        );
    }
    Ok(())
}
