//! Flat torus with one marked point: S₀₀(λ) against the 2π cone and its
//! exponential approach at large |λ|.

use conic_spectra::models::{cone_entry, SpectralModel, TorusLattice, TorusModel};

fn main() -> conic_spectra::Result<()> {
    for lattice in [
        TorusLattice::unit_square(),
        TorusLattice::new([1.0, 0.0], [0.5, 3f64.sqrt() / 2.0])?,
    ] {
        let model = TorusModel::new(lattice.clone());
        println!(
            "lattice {:?}, area {:.6}, shortest vector {:.6}",
            lattice.basis(),
            lattice.area(),
            lattice.shortest_vector()
        );
        println!(
            "{:>8} {:>18} {:>18} {:>12}",
            "λ", "S₀₀", "cone", "difference"
        );
        for t in [1.0, 6.25, 25.0, 100.0, 400.0] {
            let s = model.s_matrix(-t)?[(0, 0)].re;
            let c = cone_entry(0.0, -t)?;
            println!("{:>8} {s:>18.12} {c:>18.12} {:>12.3e}", -t, s - c);
        }
        // continuation to positive λ between the Friedrichs eigenvalues
        let ev = model.friedrichs_eigenvalues(80.0)?;
        println!("Friedrichs levels: {:?}", ev.distinct(1e-9));
        for lambda in [5.0, 20.0, 45.0] {
            println!(
                "  S₀₀({lambda}) = {:.12}",
                model.s_matrix(lambda)?[(0, 0)].re
            );
        }
        println!();
    }
    Ok(())
}
