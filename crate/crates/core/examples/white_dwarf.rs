//! Magnetized white-dwarf structure: one model in detail, then mass–radius
//! curves for the field-free and magnetized stars.
//!
//! Some central densities of the paper field profile never reach a surface
//! (the envelope is held up by magnetic pressure); those are reported and
//! skipped.
//!
//! ```bash
//! cargo run --example white_dwarf
//! ```

use landau::stellar::{integrate_structure, mass_radius_curve, PiecewiseFieldProfile, StructureOptions};
use landau::units::PhysicalConstants;

fn main() -> landau::Result<()> {
    let constants = PhysicalConstants::codata();
    let opts = StructureOptions::default();

    let field = PiecewiseFieldProfile::paper(2e15)?;
    let model = integrate_structure(5.0, &field, &constants, &opts)?;
    println!(
        "paper profile, eps_c = 5: M = {:.3} Msun, R = {:.1} km, surface B = {:.2e} G, {} samples",
        model.total_mass_msun,
        model.surface_r_km,
        model.surface_b,
        model.points.len()
    );

    let central = [3.0, 5.0, 12.0, 25.0];
    for field in [PiecewiseFieldProfile::zero(), PiecewiseFieldProfile::paper(2e15)?] {
        println!("{}:", field.label);
        for (eps, point) in central.iter().zip(mass_radius_curve(&central, &field, &constants, &opts)) {
            match point {
                Ok(p) => println!("  eps_c = {eps:>4}: M = {:.3} Msun, R = {:.1} km", p.mass_msun, p.radius_km),
                Err(e) => println!("  eps_c = {eps:>4}: {e}"),
            }
        }
    }
    Ok(())
}
