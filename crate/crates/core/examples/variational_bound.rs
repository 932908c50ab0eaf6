//! Gaussian variational bound on the spin-up ground level against the
//! shooting solution, with paper-calibrated and CODATA constants.
//!
//! ```bash
//! cargo run --example variational_bound
//! ```

use landau::analytic::variational_ground;
use landau::eigensolver::{solve_level, SolverOptions};
use landau::field::{FieldProfile, QuantumNumbers, Spin};
use landau::units::PhysicalConstants;

fn main() -> landau::Result<()> {
    let opts = SolverOptions::default();
    for constants in [PhysicalConstants::paper_calibrated(), PhysicalConstants::codata()] {
        println!("constants: {}", constants.convention.as_str());
        for n in [-0.5, -0.2, 0.0, 1.0, 4.0] {
            let profile = FieldProfile::new(1e15, n)?.with_constants(constants);
            let computed = solve_level(&profile, QuantumNumbers::new(0, Spin::Up, 0), &opts)?.alpha;
            let bound = variational_ground(&profile, Spin::Up)?;
            println!(
                "  n = {n:>4}: computed {computed:>9.3}, bound {bound:>9.3}, excess {:>6.2}%",
                100.0 * (bound - computed) / computed
            );
        }
    }
    Ok(())
}
