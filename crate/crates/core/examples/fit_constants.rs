//! Fit the two-constant eigenvalue formula to computed spectra and compare
//! with the tabulated constants.
//!
//! ```bash
//! cargo run --example fit_constants
//! ```

use landau::analytic::{fit_alpha, fit_constants, published_fit_constants, FitSpace, FIT_FIELD_UNIT};
use landau::eigensolver::{spectrum, SolverOptions};
use landau::field::{FieldProfile, Spin};
use landau::units::PhysicalConstants;

fn main() -> landau::Result<()> {
    let b0 = 1e15;
    // The fit formula takes B₀ in units of 10¹⁵ G·pm⁻ⁿ.
    let b0_fit = b0 / FIT_FIELD_UNIT;
    let opts = SolverOptions::default();
    for n in [-0.4, 0.0, 1.0, 2.0] {
        // The tabulated constants were obtained with the paper's calibration.
        let profile = FieldProfile::new(b0, n)?.with_constants(PhysicalConstants::paper_calibrated());
        let down = spectrum(&profile, 0, Spin::Down, 9, &opts)?;
        let up = spectrum(&profile, 0, Spin::Up, 9, &opts)?;
        let fit = fit_constants(&down, &up, b0_fit, FitSpace::Linear)?;
        let table = published_fit_constants(n).map(|t| format!("table C3 {:.3}, C5 {:.4}", t.c3, t.c5));
        println!(
            "n = {n:>4}: C3 {:>8.3}, C5 {:.4}, rms {:.2e}   {}",
            fit.constants.c3,
            fit.constants.c5,
            fit.rms,
            table.unwrap_or_default()
        );
        let nu = 5;
        println!(
            "          nu = {nu} spin-up: computed {:.4}, formula {:.4}",
            up.levels[nu as usize].alpha,
            fit_alpha(&fit.constants, b0_fit, nu, Spin::Up)
        );
    }
    Ok(())
}
