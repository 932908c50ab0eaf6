//! Power-law field profile `B = B₀ρⁿ`, its symmetric-gauge potential and the
//! effective potential of the reduced radial equation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::units::PhysicalConstants;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Down, Spin::Up];

    /// +1 for spin-up (+σ·B), −1 for spin-down.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Down => -1.0,
            Spin::Up => 1.0,
        }
    }

    pub fn label(self) -> char {
        match self {
            Spin::Down => 'd',
            Spin::Up => 'u',
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Down => "down",
            Spin::Up => "up",
        })
    }
}

impl std::str::FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "down" | "d" | "-" => Ok(Spin::Down),
            "up" | "u" | "+" => Ok(Spin::Up),
            other => Err(Error::InvalidInput(format!("unknown spin `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers {
    /// Azimuthal quantum number.
    pub m: i32,
    pub spin: Spin,
    /// Level index, equal to the number of radial nodes.
    pub nu: u32,
}

impl QuantumNumbers {
    pub fn new(m: i32, spin: Spin, nu: u32) -> Self {
        Self { m, spin, nu }
    }
}

/// `B(ρ) = B₀ρⁿ` with B₀ in G·pm⁻ⁿ and ρ in pm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldProfile {
    b0: f64,
    n: f64,
    constants: PhysicalConstants,
}

impl FieldProfile {
    /// A profile that admits bound states: `B₀ > 0`, `n > −1`.
    pub fn new(b0: f64, n: f64) -> Result<Self> {
        if !(n.is_finite() && n > -1.0) {
            return Err(Error::InvalidInput(format!(
                "power-law index must satisfy n > -1 for bound states, got {n}"
            )));
        }
        Self::unrestricted(b0, n)
    }

    /// Any index with a well-defined gauge potential (`n ≠ −2`). Profiles with
    /// `n ≤ −1` are only meaningful for potential plots and classification.
    pub fn unrestricted(b0: f64, n: f64) -> Result<Self> {
        if !(b0.is_finite() && b0 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "field amplitude must be positive, got {b0}"
            )));
        }
        if !n.is_finite() || n == -2.0 {
            return Err(Error::InvalidInput(format!(
                "power-law index {n} has no symmetric-gauge potential"
            )));
        }
        Ok(Self {
            b0,
            n,
            constants: PhysicalConstants::codata(),
        })
    }

    pub fn with_constants(mut self, constants: PhysicalConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn admits_bound_states(&self) -> bool {
        self.n > -1.0
    }

    /// kλ_e B₀ = B₀/B_c (carries pm⁻ⁿ).
    pub fn reduced_amplitude(&self) -> f64 {
        self.b0 / self.constants.b_c
    }

    /// Field strength in units where lengths are measured in λ_e:
    /// `β = (B₀/B_c) λ_eⁿ`, so that `kB₀ρⁿ⁺¹ = β xⁿ⁺¹` with `x = ρ/λ_e`.
    pub fn beta(&self) -> f64 {
        self.reduced_amplitude() * self.constants.lambda_e.powf(self.n)
    }

    /// Natural eigenvalue scale `β^{2/(n+2)}`.
    pub fn alpha_scale(&self) -> f64 {
        self.beta().powf(2.0 / (self.n + 2.0))
    }

    /// Natural length scale `λ_e β^{−1/(n+2)}`, pm.
    pub fn length_scale(&self) -> f64 {
        self.constants.lambda_e * self.beta().powf(-1.0 / (self.n + 2.0))
    }
}

fn check_radius(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("radius must be positive, got {rho}")))
    }
}

/// `B₀ρⁿ`, G.
pub fn field_strength(profile: &FieldProfile, rho: f64) -> Result<f64> {
    check_radius(rho)?;
    Ok(profile.b0 * rho.powf(profile.n))
}

/// Azimuthal component `A = B₀ρⁿ⁺¹/(n+2)`, G·pm.
pub fn vector_potential(profile: &FieldProfile, rho: f64) -> Result<f64> {
    check_radius(rho)?;
    Ok(profile.b0 * rho.powf(profile.n + 1.0) / (profile.n + 2.0))
}

/// Field-dependent part of the effective potential: the diamagnetic term
/// `(kB₀ρⁿ⁺¹/(n+2))²` plus the paramagnetic and Zeeman terms
/// `kλ_e(−2m/(n+2) ± 1)B₀ρⁿ`. Caller guarantees `rho > 0`.
pub(crate) fn magnetic_potential(profile: &FieldProfile, m: i32, spin: Spin, rho: f64) -> f64 {
    let n = profile.n;
    let b = profile.reduced_amplitude();
    let lambda = profile.constants.lambda_e;
    let rn = rho.powf(n);
    let dia = b * rn * rho / (lambda * (n + 2.0));
    let para = -2.0 * f64::from(m) / (n + 2.0) + spin.sign();
    dia * dia + para * b * rn
}

pub(crate) fn centrifugal(lambda: f64, m: i32, rho: f64) -> f64 {
    let m2 = f64::from(m) * f64::from(m);
    lambda * lambda * (m2 - 0.25) / (rho * rho)
}

/// Dimensionless `V_eff(ρ)` of the reduced equation for `u = √ρ R`.
pub fn effective_potential(profile: &FieldProfile, q: QuantumNumbers, rho: f64) -> Result<f64> {
    check_radius(rho)?;
    Ok(centrifugal(profile.constants.lambda_e, q.m, rho) + magnetic_potential(profile, q.m, q.spin, rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confinement {
    Confining,
    Repulsive,
}

/// Geometric grid of `samples` points on `[rho_min, rho_max]`.
pub fn geometric_grid(rho_min: f64, rho_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(rho_min > 0.0 && rho_max > rho_min && rho_max.is_finite()) || samples < 2 {
        return Err(Error::InvalidInput(format!(
            "invalid grid [{rho_min}, {rho_max}] with {samples} samples"
        )));
    }
    let ratio = (rho_max / rho_min).ln() / (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| {
            if i + 1 == samples {
                rho_max
            } else {
                rho_min * (ratio * i as f64).exp()
            }
        })
        .collect())
}

const PLATEAU_TOL: f64 = 1e-12;

fn strictly_below(a: f64, b: f64) -> bool {
    b - a > PLATEAU_TOL * a.abs().max(b.abs())
}

/// Smallest logarithmic growth rate `d ln(V − V_min)/d ln ρ` at the outer
/// end of the grid that still counts as an unbounded rise. Confining wells
/// grow like ρ^(2n+2); potentials that level off (n = −1) or fall (n < −1)
/// stay far below this.
pub const CONFINING_GROWTH_RATE: f64 = 1e-2;

/// Confining iff `V_eff` is still rising at `rho_max` and grows without
/// bound there, judged by the log-slope of `V_eff − min V_eff` over the
/// last sample interval; otherwise repulsive.
pub fn classify_confinement(
    profile: &FieldProfile,
    q: QuantumNumbers,
    rho_min: f64,
    rho_max: f64,
    samples: usize,
) -> Result<Confinement> {
    if samples < 100 {
        return Err(Error::InvalidInput(format!(
            "classification needs at least 100 samples, got {samples}"
        )));
    }
    let rho = geometric_grid(rho_min, rho_max, samples)?;
    let v = rho
        .iter()
        .map(|&r| effective_potential(profile, q, r))
        .collect::<Result<Vec<_>>>()?;

    let (a, b) = (v[samples - 2], v[samples - 1]);
    if !strictly_below(a, b) {
        return Ok(Confinement::Repulsive);
    }
    let floor = v.iter().copied().fold(f64::INFINITY, f64::min);
    let growth = ((b - floor) / (a - floor)).ln() / (rho[samples - 1] / rho[samples - 2]).ln();
    Ok(if growth > CONFINING_GROWTH_RATE {
        Confinement::Confining
    } else {
        Confinement::Repulsive
    })
}
