//! Effective potential of the reduced radial equation for several field
//! exponents, and whether each profile confines the electron.
//!
//! ```bash
//! cargo run --example effective_potential
//! ```

use landau::field::{classify_confinement, effective_potential, FieldProfile, QuantumNumbers, Spin};

fn main() -> landau::Result<()> {
    let b0 = 1e15;
    let q = QuantumNumbers::new(0, Spin::Down, 0);
    let radii = [0.1, 0.3, 1.0, 3.0];

    println!("{:>6} {:>12} {:>12} {:>12} {:>12}  confinement", "n", "rho=0.1pm", "0.3pm", "1pm", "3pm");
    for n in [1.0, 0.0, -0.5, -1.0, -1.1] {
        // `unrestricted` admits n <= -1, where no bound states exist.
        let profile = FieldProfile::unrestricted(b0, n)?;
        let v = radii
            .iter()
            .map(|&r| effective_potential(&profile, q, r))
            .collect::<landau::Result<Vec<_>>>()?;
        let kind = classify_confinement(&profile, q, 0.05, 50.0, 2000)?;
        println!(
            "{n:>6} {:>12.4} {:>12.4} {:>12.4} {:>12.4}  {kind:?}",
            v[0], v[1], v[2], v[3]
        );
    }
    Ok(())
}
