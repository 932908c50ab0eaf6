//! Mandelstam–Tamm transition time and quantum speed between the two
//! lowest m = 0 levels, swept over the field exponent.
//!
//! ```bash
//! cargo run --example quantum_speed
//! ```

use landau::eigensolver::SolverOptions;
use landau::field::Spin;
use landau::qspeed::{local_maxima, speed_sweep, DisplacementMeasure};
use landau::units::PhysicalConstants;

fn main() -> landau::Result<()> {
    let n_values = [-0.4, 0.0, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0];
    let constants = PhysicalConstants::codata();
    let opts = SolverOptions::default();
    for spin in [Spin::Down, Spin::Up] {
        println!("spin {}:", spin.label());
        let results = speed_sweep(1e15, &n_values, spin, &constants, &opts, DisplacementMeasure::Literal)
            .into_iter()
            .collect::<landau::Result<Vec<_>>>()?;
        for r in &results {
            println!(
                "  n = {:>4}: dH {:.4e} MeV, t_min {:.3e} s, speed {:.4e} pm/s",
                r.n, r.delta_h, r.t_min, r.speed
            );
        }
        let speeds: Vec<f64> = results.iter().map(|r| r.speed).collect();
        let maxima: Vec<f64> = local_maxima(&speeds).iter().map(|&i| n_values[i]).collect();
        println!("  local maxima at n = {maxima:?}");
    }
    Ok(())
}
