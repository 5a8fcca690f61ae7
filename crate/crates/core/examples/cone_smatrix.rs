//! S-matrix of infinite cones: the log channel and the power channels.

use conic_spectra::channels::ChannelSet;
use conic_spectra::models::cone_s_matrix;
use std::f64::consts::PI;

fn main() -> conic_spectra::Result<()> {
    for angle in [3.0 * PI, 4.0 * PI, 5.5 * PI] {
        let cs = ChannelSet::new(&[angle])?;
        println!("cone angle {:.4} ({} channels)", angle, cs.len());
        for lambda in [-0.25, -1.0, -4.0] {
            let s = cone_s_matrix(angle, lambda)?;
            let row: Vec<String> = cs
                .channels()
                .iter()
                .enumerate()
                .map(|(i, c)| format!("ν={:+.3}: {:+.10}", c.nu, s[(i, i)].re))
                .collect();
            println!("  λ={lambda:<6} {}", row.join("  "));
        }
    }
    Ok(())
}
