//! Spectral shift ξ(λ) = N_L(λ) − N_F(λ) and ln D along the negative axis.

use conic_spectra::channels::{rotation_bc_on, ChannelId};
use conic_spectra::krein::{spectral_shift_sweep, BranchedLogD};
use conic_spectra::models::{SpectralModel, TruncatedCone};
use std::f64::consts::PI;

fn main() -> conic_spectra::Result<()> {
    let model = TruncatedCone::new(4.0 * PI, 1.0)?;
    let bc = rotation_bc_on(
        model.channel_set(),
        &[(ChannelId { point: 0, k: 1 }, PI / 2.0)],
    )?;
    let ts: Vec<f64> = (0..=60).map(|i| 0.5 * i as f64).collect();
    let xi = spectral_shift_sweep(&bc, &model, &ts)?;
    let mut last = f64::NAN;
    for (t, x) in ts.iter().zip(&xi) {
        if *x != last {
            println!("ξ = {x:+} from λ = {t}");
            last = *x;
        }
    }
    let path = BranchedLogD::track(&bc, &model, -1e4, -1e-2, PI, 40)?;
    println!(
        "ln D tracked over {} points, largest phase step {:.3}, ln D(−0.01) = {:.10}",
        path.lambdas().len(),
        path.max_phase_step(),
        path.end_value()
    );
    Ok(())
}
