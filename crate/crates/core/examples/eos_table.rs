//! Landau-quantized electron equation of state in a uniform field and in a
//! power-law field, next to the field-free Chandrasekhar form.
//!
//! ```bash
//! cargo run --example eos_table
//! ```

use landau::analytic::interpolate_fit_table;
use landau::eos::{chandrasekhar_eos, eos_point, max_level, LevelScheme, DEFAULT_MU_E};
use landau::field::Spin;
use landau::units::PhysicalConstants;

fn main() -> landau::Result<()> {
    let constants = PhysicalConstants::codata();
    let b0 = 1e15;
    let uniform = LevelScheme::uniform(b0, constants)?;
    let power_law = LevelScheme::fit(interpolate_fit_table(-0.4)?, b0, constants)?;

    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>7}", "eps_F", "rho (n=0)", "P (n=0)", "P (n=-0.4)", "P (B=0)", "levels");
    for eps_f in [1.5, 3.0, 5.0, 8.0, 12.0, 17.0] {
        let u = eos_point(&uniform, eps_f, DEFAULT_MU_E)?;
        let p = eos_point(&power_law, eps_f, DEFAULT_MU_E)?;
        let c = chandrasekhar_eos(&constants, eps_f, DEFAULT_MU_E)?;
        println!(
            "{eps_f:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>7}",
            u.rho_mass,
            u.p_e,
            p.p_e,
            c.p_e,
            max_level(&uniform, eps_f, Spin::Down)? + 1
        );
    }
    Ok(())
}
