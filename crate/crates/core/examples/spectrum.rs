//! Spin-resolved m = 0 spectra and the ordering of the two spin branches.
//!
//! In a uniform field every spin-up level is degenerate with the next
//! spin-down level; a power-law field lifts that degeneracy and the
//! interleaving pattern depends on the sign of n.
//!
//! ```bash
//! cargo run --example spectrum
//! ```

use landau::eigensolver::{solve_level, spin_pattern, SolverOptions};
use landau::field::{FieldProfile, QuantumNumbers, Spin};

fn main() -> landau::Result<()> {
    let opts = SolverOptions::default();
    for n in [2.0, 0.0, -0.4, -0.8] {
        let profile = FieldProfile::new(1e15, n)?;
        print!("n = {n:>4}:");
        for nu in 0..3 {
            for spin in [Spin::Down, Spin::Up] {
                let state = solve_level(&profile, QuantumNumbers::new(0, spin, nu), &opts)?;
                print!("  {}{nu} {:.4}", spin.label(), state.alpha);
            }
        }
        println!("\n          pattern {}", spin_pattern(&profile, 0, 7, &opts)?);
    }
    Ok(())
}
