//! Dirichlet-truncated cone: S(λ) on both sides of the spectrum, S(0) and
//! the Gram identity Ṡ = ‖G‖².

use conic_spectra::channels::ChannelId;
use conic_spectra::models::{g_gram, SpectralModel, TruncatedCone};
use std::f64::consts::PI;

fn main() -> conic_spectra::Result<()> {
    let model = TruncatedCone::new(4.0 * PI, 1.0)?;
    let half = model
        .channel_set()
        .index_of(ChannelId { point: 0, k: 1 })
        .expect("ν = ½ channel");

    println!("{:>8} {:>20} {:>20}", "λ", "S_½½(λ)", "closed form");
    for lambda in [-25.0, -4.0, -1.0, -0.01, 1.0, 5.0, 20.0] {
        let s = model.s_matrix(lambda)?[(half, half)].re;
        let exact = if lambda < 0.0 {
            let k = (-lambda as f64).sqrt();
            -k / k.tanh()
        } else {
            let k = (lambda as f64).sqrt();
            -k / k.tan()
        };
        println!("{lambda:>8} {s:>20.14} {exact:>20.14}");
    }

    let zero = model.s_matrix_at_zero()?;
    println!(
        "S(0) diagonal: {:?}",
        (0..3).map(|i| zero.values[(i, i)].re).collect::<Vec<_>>()
    );

    let lambda = -1.0;
    let gram = g_gram(&model, half, half, lambda)?.re;
    let fd = model.s_matrix_derivative(lambda)?[(half, half)].re;
    println!("Ṡ_½½(−1): Gram {gram:.12}, finite difference {fd:.12}");

    let first = model.friedrichs_eigenvalues(60.0)?;
    println!("Friedrichs eigenvalues below 60:");
    for e in first.entries() {
        println!("  {:>12.8}  sector {:+}", e.value, e.sector);
    }
    Ok(())
}
