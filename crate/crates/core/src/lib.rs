//! Bound states of a relativistic electron in power-law magnetic fields
//! `B = B₀ρⁿ ẑ`, and the applications built on those spectra.
//!
//! The decoupled Dirac problem in the plane perpendicular to the field
//! reduces to the scalar radial equation
//!
//! ```text
//! α u = (−λ_e² d²/dρ² + V_eff(ρ)) u,     α = ε² − 1,  ε = E / m_e c²
//! ```
//!
//! which [`eigensolver`] solves by shooting and matching. On top of the
//! spectra sit:
//!
//! - [`analytic`]: uniform-field closed forms, the variational ground-state
//!   bound and the two-constant eigenvalue fit,
//! - [`qspeed`]: Mandelstam–Tamm transition times and quantum speeds,
//! - [`eos`]: the zero-temperature Landau-quantized electron equation of state,
//! - [`stellar`]: magnetized white-dwarf structure and mass–radius curves,
//! - [`run`]: the batch front end that writes CSV tables and run manifests.
//!
//! ```
//! use landau::field::{FieldProfile, QuantumNumbers, Spin};
//! use landau::eigensolver::{solve_level, SolverOptions};
//!
//! let profile = FieldProfile::new(1e15, 0.0).unwrap();
//! let q = QuantumNumbers::new(0, Spin::Up, 0);
//! let state = solve_level(&profile, q, &SolverOptions::default()).unwrap();
//! // Uniform field: α = 2 B₀/B_c for the spin-up ground level.
//! assert!((state.alpha / (2.0 * 1e15 / profile.constants().b_c) - 1.0).abs() < 1e-6);
//! ```

pub mod analytic;
pub mod eigensolver;
pub mod eos;
pub mod field;
pub mod oracle;
pub mod qspeed;
pub mod quadrature;
pub mod run;
pub mod stellar;
pub mod units;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no bound state with {nu} nodes in alpha bracket [{lo:.6e}, {hi:.6e}]: {reason}")]
    NoBoundState {
        nu: u32,
        lo: f64,
        hi: f64,
        reason: String,
    },

    #[error("matching did not converge for level {nu} after {iterations} iterations (bracket [{lo:.9e}, {hi:.9e}])")]
    MatchingFailed {
        nu: u32,
        iterations: usize,
        lo: f64,
        hi: f64,
    },

    #[error("level {nu} ({spin}) failed: {source}")]
    Level {
        nu: u32,
        spin: field::Spin,
        #[source]
        source: Box<Error>,
    },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("structure integration failed at r = {radius_km:.3} km: {reason}")]
    Structure { radius_km: f64, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub use field::{FieldProfile, QuantumNumbers, Spin};
pub use units::{ConstantConvention, PhysicalConstants};
