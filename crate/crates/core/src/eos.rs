//! Zero-temperature electron equation of state with Landau-quantized
//! transverse motion, and the non-magnetic Chandrasekhar limit.
//!
//! With `x_F(ν) = √(ε_F² − 1 − α(ν))` the number density and pressure are
//!
//! ```text
//! n_e = 1/((2π)²λ_e³) Σ_spin Σ_ν β(ν) x_F(ν)
//! P_e = m_ec²/((2π)²λ_e³) Σ_spin Σ_ν β(ν) (1 + α(ν)) f₂(x_F(ν)/√(1 + α(ν)))
//! ```
//!
//! where `β` is the level spacing that plays the role of the Landau
//! degeneracy.

use serde::{Deserialize, Serialize};

use crate::analytic::{fit_alpha, FitConstants, FIT_FIELD_UNIT};
use crate::eigensolver::{spectrum, SolverOptions};
use crate::field::{FieldProfile, Spin};
use crate::units::{PhysicalConstants, CM_PER_PM};
use crate::{Error, Result};

/// Default mean molecular weight per electron (carbon–oxygen matter).
pub const DEFAULT_MU_E: f64 = 2.0;

/// Where the level energies α±(ν) come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum LevelSource {
    /// Uniform field: `α = 2b(ν + ½ ± ½)` with `b = B/B_c`.
    UniformClosedForm { b: f64 },
    /// Two-constant formula with `b0` in units of 10¹⁵ G·pm⁻ⁿ.
    FitFormula { constants: FitConstants, b0: f64 },
    /// Solved spectra (m = 0); the table bounds the reachable ε_F.
    ComputedSpectrum { down: Vec<f64>, up: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    pub source: LevelSource,
    pub constants: PhysicalConstants,
}

impl LevelScheme {
    /// Uniform field of strength `b_field` in G.
    pub fn uniform(b_field: f64, constants: PhysicalConstants) -> Result<Self> {
        if !(b_field.is_finite() && b_field > 0.0) {
            return Err(Error::InvalidInput(format!("field must be positive, got {b_field}")));
        }
        Ok(Self {
            source: LevelSource::UniformClosedForm { b: b_field / constants.b_c },
            constants,
        })
    }

    /// Fit formula with `b0` in G·pm⁻ⁿ.
    pub fn fit(fc: FitConstants, b0: f64, constants: PhysicalConstants) -> Result<Self> {
        if !(b0.is_finite() && b0 > 0.0) {
            return Err(Error::InvalidInput(format!("field must be positive, got {b0}")));
        }
        Ok(Self {
            source: LevelSource::FitFormula {
                constants: fc,
                b0: b0 / FIT_FIELD_UNIT,
            },
            constants,
        })
    }

    /// Tabulated levels. The spin-down ground level is pinned to its exact
    /// value 0, removing solver round-off.
    pub fn computed(down: Vec<f64>, up: Vec<f64>, constants: PhysicalConstants) -> Result<Self> {
        if down.len() < 2 || up.len() < 2 {
            return Err(Error::InvalidInput("computed scheme needs at least two levels per spin".into()));
        }
        let mut down = down;
        down[0] = 0.0;
        for (label, levels) in [("down", &down), ("up", &up)] {
            if levels.windows(2).any(|w| w[1] <= w[0]) || levels.iter().any(|a| *a < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "spin-{label} levels must be non-negative and strictly increasing"
                )));
            }
        }
        Ok(Self {
            source: LevelSource::ComputedSpectrum { down, up },
            constants,
        })
    }

    /// Solve `levels` m = 0 levels of each spin for `profile`.
    pub fn from_profile(profile: &FieldProfile, levels: u32, opts: &SolverOptions) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidInput("computed scheme needs at least two levels per spin".into()));
        }
        let down = spectrum(profile, 0, Spin::Down, levels - 1, opts)?.alphas();
        let up = spectrum(profile, 0, Spin::Up, levels - 1, opts)?.alphas();
        Self::computed(down, up, *profile.constants())
    }

    pub fn source_name(&self) -> &'static str {
        match self.source {
            LevelSource::UniformClosedForm { .. } => "uniform",
            LevelSource::FitFormula { .. } => "fit",
            LevelSource::ComputedSpectrum { .. } => "computed",
        }
    }

    /// α±(ν).
    pub fn alpha(&self, spin: Spin, nu: u32) -> Result<f64> {
        match &self.source {
            LevelSource::UniformClosedForm { b } => Ok(2.0 * b * (f64::from(nu) + 0.5 + 0.5 * spin.sign())),
            LevelSource::FitFormula { constants, b0 } => Ok(fit_alpha(constants, *b0, nu, spin)),
            LevelSource::ComputedSpectrum { down, up } => {
                let levels = match spin {
                    Spin::Down => down,
                    Spin::Up => up,
                };
                levels.get(nu as usize).copied().ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "computed scheme holds {} spin-{spin} levels, level {nu} requested",
                        levels.len()
                    ))
                })
            }
        }
    }
}

/// `x_F = √(ε_F² − 1 − α)`.
pub fn x_fermi(eps_f: f64, alpha: f64) -> Result<f64> {
    check_eps(eps_f)?;
    let arg = eps_f * eps_f - 1.0 - alpha;
    if arg < 0.0 {
        return Err(Error::InvalidInput(format!(
            "level alpha = {alpha} lies above the Fermi energy eps_F = {eps_f}"
        )));
    }
    Ok(arg.sqrt())
}

fn check_eps(eps_f: f64) -> Result<()> {
    if eps_f.is_finite() && eps_f >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("Fermi energy must satisfy eps_F >= 1, got {eps_f}")))
    }
}

/// Largest occupied ν (α(ν) ≤ ε_F² − 1), or −1 for an empty branch.
pub fn max_level(scheme: &LevelScheme, eps_f: f64, spin: Spin) -> Result<i64> {
    check_eps(eps_f)?;
    let target = eps_f * eps_f - 1.0;
    let fits = |nu: u32| -> Result<bool> { Ok(scheme.alpha(spin, nu)? <= target) };
    if !fits(0)? {
        return Ok(-1);
    }
    if let LevelSource::ComputedSpectrum { down, up } = &scheme.source {
        let levels = if spin == Spin::Down { down } else { up };
        let count = levels.iter().take_while(|a| **a <= target).count();
        if count == levels.len() {
            return Err(Error::InvalidInput(format!(
                "eps_F = {eps_f} fills all {count} tabulated spin-{spin} levels; extend the spectrum"
            )));
        }
        return Ok(count as i64 - 1);
    }
    // α is increasing: gallop, then bisect.
    let mut lo = 0u32;
    let mut hi = 1u32;
    while fits(hi)? {
        lo = hi;
        hi = hi.checked_mul(2).ok_or_else(|| Error::InvalidInput("level index overflow".into()))?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(i64::from(lo))
}

/// Level weight: `(α(ν+1) − α(ν−1))/2` for ν ≥ 1 and the one-sided
/// `α(1) − α(0)` for the ground level.
pub fn level_weight(scheme: &LevelScheme, nu: u32, spin: Spin) -> Result<f64> {
    if nu == 0 {
        Ok(scheme.alpha(spin, 1)? - scheme.alpha(spin, 0)?)
    } else {
        Ok(0.5 * (scheme.alpha(spin, nu + 1)? - scheme.alpha(spin, nu - 1)?))
    }
}

/// `f₂(z) = ½(z√(1+z²) − asinh z) = ∫₀ᶻ t²/√(1+t²) dt`.
pub fn f2(z: f64) -> f64 {
    if z < SERIES_LIMIT {
        root_moment(z, 3)
    } else {
        0.5 * (z * (1.0 + z * z).sqrt() - z.asinh())
    }
}

/// Below this argument the closed forms lose digits to cancellation and
/// [`root_moment`] is summed instead.
const SERIES_LIMIT: f64 = 0.5;

/// `∫₀ˣ t^{p−1}/√(1+t²) dt = Σ_k C(−½, k) x^{2k+p}/(2k+p)` for `x < 1`.
fn root_moment(x: f64, p: i32) -> f64 {
    let x2 = x * x;
    let (mut coeff, mut power, mut sum) = (1.0, x.powi(p), 0.0);
    for k in 0..200 {
        let term = coeff * power / f64::from(2 * k + p);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        coeff *= -f64::from(2 * k + 1) / f64::from(2 * k + 2);
        power *= x2;
    }
    sum
}

/// Occupied-level sums `(Σ β x_F, Σ β (1+α) f₂(x_F/√(1+α)))` over both
/// spins, in one pass that evaluates each α once.
fn level_sums(scheme: &LevelScheme, eps_f: f64) -> Result<(f64, f64)> {
    let (mut n_sum, mut p_sum) = (0.0, 0.0);
    for spin in Spin::BOTH {
        let top = max_level(scheme, eps_f, spin)?;
        if top < 0 {
            continue;
        }
        let (mut prev, mut cur) = (f64::NAN, scheme.alpha(spin, 0)?);
        for nu in 0..=top as u32 {
            let next = scheme.alpha(spin, nu + 1)?;
            // Same weights as `level_weight`.
            let beta = if nu == 0 { next - cur } else { 0.5 * (next - prev) };
            let x = x_fermi(eps_f, cur)?;
            let s = 1.0 + cur;
            n_sum += beta * x;
            p_sum += beta * s * f2(x / s.sqrt());
            (prev, cur) = (cur, next);
        }
    }
    Ok((n_sum, p_sum))
}

fn density_from_sum(constants: &PhysicalConstants, n_sum: f64) -> f64 {
    n_sum / (4.0 * std::f64::consts::PI.powi(2) * constants.lambda_e.powi(3))
}

fn pressure_from_sum(constants: &PhysicalConstants, p_sum: f64) -> f64 {
    constants.m_e_c2_erg() * p_sum / (4.0 * std::f64::consts::PI.powi(2) * constants.lambda_e_cm().powi(3))
}

/// Electron number density, pm⁻³.
pub fn number_density(scheme: &LevelScheme, eps_f: f64) -> Result<f64> {
    Ok(density_from_sum(&scheme.constants, level_sums(scheme, eps_f)?.0))
}

/// Electron pressure, erg/cm³.
pub fn pressure(scheme: &LevelScheme, eps_f: f64) -> Result<f64> {
    Ok(pressure_from_sum(&scheme.constants, level_sums(scheme, eps_f)?.1))
}

/// Standard uniform-field Landau gas with spin degeneracy `g₀ = 1`,
/// `g_{ν≥1} = 2`: returns `(n_e` in pm⁻³, `P_e` in erg/cm³`)`.
pub fn uniform_reference(constants: &PhysicalConstants, b_field: f64, eps_f: f64) -> Result<(f64, f64)> {
    check_eps(eps_f)?;
    let b = b_field / constants.b_c;
    let target = eps_f * eps_f - 1.0;
    let (mut n_sum, mut p_sum) = (0.0, 0.0);
    let mut nu = 0u64;
    while 2.0 * b * nu as f64 <= target {
        let g = if nu == 0 { 1.0 } else { 2.0 };
        let s = 1.0 + 2.0 * b * nu as f64;
        let x = (target - 2.0 * b * nu as f64).sqrt();
        n_sum += g * x;
        p_sum += g * s * f2(x / s.sqrt());
        nu += 1;
    }
    let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
    Ok((
        2.0 * b * n_sum / (four_pi2 * constants.lambda_e.powi(3)),
        2.0 * b * constants.m_e_c2_erg() * p_sum / (four_pi2 * constants.lambda_e_cm().powi(3)),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EosPoint {
    pub eps_f: f64,
    /// cm⁻³.
    pub n_e: f64,
    /// g/cm³.
    pub rho_mass: f64,
    /// erg/cm³.
    pub p_e: f64,
}

fn point(constants: &PhysicalConstants, eps_f: f64, n_e_pm3: f64, p_e: f64, mu_e: f64) -> EosPoint {
    let n_e = n_e_pm3 / CM_PER_PM.powi(3);
    EosPoint {
        eps_f,
        n_e,
        rho_mass: n_e * constants.m_p * mu_e,
        p_e,
    }
}

fn check_mu(mu_e: f64) -> Result<()> {
    if mu_e.is_finite() && mu_e > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("mu_e must be positive, got {mu_e}")))
    }
}

/// One EOS point of a Landau-quantized scheme.
pub fn eos_point(scheme: &LevelScheme, eps_f: f64, mu_e: f64) -> Result<EosPoint> {
    check_mu(mu_e)?;
    let (n_sum, p_sum) = level_sums(scheme, eps_f)?;
    let c = &scheme.constants;
    Ok(point(c, eps_f, density_from_sum(c, n_sum), pressure_from_sum(c, p_sum), mu_e))
}

/// Non-magnetic degenerate gas with `x = √(ε_F² − 1)`.
pub fn chandrasekhar_eos(constants: &PhysicalConstants, eps_f: f64, mu_e: f64) -> Result<EosPoint> {
    check_eps(eps_f)?;
    check_mu(mu_e)?;
    let x = (eps_f * eps_f - 1.0).sqrt();
    let pi2 = std::f64::consts::PI.powi(2);
    let n_e = x.powi(3) / (3.0 * pi2 * constants.lambda_e.powi(3));
    let p_e = chandrasekhar_pressure_unit(constants) * chandrasekhar_shape(x);
    Ok(point(constants, eps_f, n_e, p_e, mu_e))
}

/// `m_e c² / (8π² λ_e³)` in erg/cm³.
fn chandrasekhar_pressure_unit(constants: &PhysicalConstants) -> f64 {
    constants.m_e_c2_erg() / (8.0 * std::f64::consts::PI.powi(2) * constants.lambda_e_cm().powi(3))
}

/// `x√(1+x²)(2x²/3 − 1) + asinh x = (8/3)∫₀ˣ t⁴/√(1+t²) dt`.
fn chandrasekhar_shape(x: f64) -> f64 {
    if x < SERIES_LIMIT {
        8.0 / 3.0 * root_moment(x, 5)
    } else {
        x * (1.0 + x * x).sqrt() * (2.0 * x * x / 3.0 - 1.0) + x.asinh()
    }
}

/// Fermi energy ε_F at which [`chandrasekhar_eos`] has pressure `p_e`
/// (erg/cm³): Newton iteration on `ln P(ln x)`, whose slope
/// `8x⁵/(3√(1+x²)·shape)` falls from 5 to 4.
pub fn chandrasekhar_fermi_energy(constants: &PhysicalConstants, p_e: f64) -> Result<f64> {
    if !(p_e.is_finite() && p_e >= 0.0) {
        return Err(Error::InvalidInput(format!("pressure must be finite and non-negative, got {p_e}")));
    }
    if p_e == 0.0 {
        return Ok(1.0);
    }
    let target = (p_e / chandrasekhar_pressure_unit(constants)).ln();
    // Non-relativistic and ultra-relativistic asymptotes bracket the start.
    let mut y = ((target - (8.0f64 / 15.0).ln()) / 5.0).min((target - (2.0f64 / 3.0).ln()) / 4.0);
    for _ in 0..100 {
        let x = y.exp();
        let shape = chandrasekhar_shape(x);
        let slope = 8.0 * x.powi(5) / (3.0 * (1.0 + x * x).sqrt() * shape);
        let step = (shape.ln() - target) / slope;
        y -= step;
        // Quadratic convergence: once the step is this small, y is exact to round-off.
        if step.abs() < 1e-10 {
            let x = y.exp();
            return Ok((1.0 + x * x).sqrt());
        }
    }
    Err(Error::InvalidInput(format!("Fermi energy for pressure {p_e:e} did not converge")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EosTable {
    pub scheme: LevelScheme,
    pub mu_e: f64,
    pub rows: Vec<EosPoint>,
}

pub const EOS_CSV_HEADER: &str = "eps_F,n_e_cm3,rho_g_cc,P_erg_cc";

impl EosTable {
    /// CSV with 9 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(EOS_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{:.8e},{:.8e},{:.8e},{:.8e}\n", r.eps_f, r.n_e, r.rho_mass, r.p_e));
        }
        out
    }

    /// Number of occupied levels (both spins) at the top of the table.
    pub fn occupied_levels(&self) -> Result<i64> {
        let top = self.rows.last().map_or(1.0, |r| r.eps_f);
        Ok(max_level(&self.scheme, top, Spin::Down)? + max_level(&self.scheme, top, Spin::Up)? + 2)
    }
}

/// Rows at `ε_F = 1 + (ε_max − 1)·i/steps`, `i = 0..=steps`.
pub fn eos_table(scheme: &LevelScheme, mu_e: f64, eps_max: f64, steps: usize) -> Result<EosTable> {
    if !(eps_max > 1.0 && eps_max.is_finite()) || steps < 10 {
        return Err(Error::InvalidInput(format!(
            "EOS table needs eps_F_max > 1 and steps >= 10, got {eps_max}, {steps}"
        )));
    }
    let rows = (0..=steps)
        .map(|i| eos_point(scheme, 1.0 + (eps_max - 1.0) * i as f64 / steps as f64, mu_e))
        .collect::<Result<Vec<_>>>()?;
    Ok(EosTable {
        scheme: scheme.clone(),
        mu_e,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn codata() -> PhysicalConstants {
        PhysicalConstants::codata()
    }

    #[test]
    fn chandrasekhar_inversion_round_trips() {
        let c = PhysicalConstants::codata();
        for eps in [1.0 + 1e-9, 1.0 + 1e-6, 1.00004, 1.01, 1.5, 3.0, 25.0, 1e3, 1e6] {
            let p = chandrasekhar_eos(&c, eps, DEFAULT_MU_E).unwrap().p_e;
            let back = chandrasekhar_fermi_energy(&c, p).unwrap();
            assert!((back - eps).abs() <= 1e-15 * eps + 1e-10 * (eps - 1.0), "{eps}: {back}");
        }
        assert_eq!(chandrasekhar_fermi_energy(&c, 0.0).unwrap(), 1.0);
        assert!(chandrasekhar_fermi_energy(&c, -1.0).is_err());
    }

    #[test]
    fn fermi_momentum_examples() {
        assert_relative_eq!(x_fermi(2f64.sqrt(), 0.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_eq!(x_fermi(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(x_fermi(17.0, 288.0).unwrap(), 0.0);
        assert!(x_fermi(17.0, 289.0).is_err());
        assert!(x_fermi(0.5, 0.0).is_err());
    }

    #[test]
    fn occupied_levels_uniform() {
        let s = LevelScheme::uniform(2e15, codata()).unwrap();
        assert_eq!(max_level(&s, 17.0, Spin::Down).unwrap(), 3);
        assert_eq!(max_level(&s, 17.0, Spin::Up).unwrap(), 2);
        assert_eq!(max_level(&s, 1.0, Spin::Down).unwrap(), 0);
        assert_eq!(max_level(&s, 1.0, Spin::Up).unwrap(), -1);
    }

    #[test]
    fn occupied_levels_computed_table() {
        let s = LevelScheme::computed(vec![1e-9, 2.0, 4.0], vec![2.0, 4.0, 6.0], codata()).unwrap();
        assert_eq!(s.alpha(Spin::Down, 0).unwrap(), 0.0);
        assert_eq!(max_level(&s, 2f64.sqrt(), Spin::Down).unwrap(), 0);
        assert_eq!(max_level(&s, 2.0, Spin::Up).unwrap(), 0);
        assert!(max_level(&s, 10.0, Spin::Up).is_err());
        assert!(LevelScheme::computed(vec![0.0, 2.0, 1.0], vec![1.0, 2.0], codata()).is_err());
    }

    #[test]
    fn weights_of_uniform_levels() {
        let s = LevelScheme::uniform(1e15, codata()).unwrap();
        let two_b = 2.0 * 1e15 / codata().b_c;
        for spin in Spin::BOTH {
            for nu in 0..5 {
                assert_relative_eq!(level_weight(&s, nu, spin).unwrap(), two_b, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn f2_values() {
        assert_eq!(f2(0.0), 0.0);
        assert_relative_eq!(f2(1.0), 0.5 * (2f64.sqrt() - (1.0 + 2f64.sqrt()).ln()), max_relative = 1e-15);
        assert_relative_eq!(f2(1.0), 0.266420, max_relative = 1e-5);
        assert_relative_eq!(f2(1e-3), 1e-9 / 3.0, max_relative = 1e-6);
        assert_relative_eq!(f2(1e-2), 1e-6 / 3.0 - 1e-10 / 10.0 + 3e-14 / 56.0, max_relative = 1e-12);
        // Series and closed form agree at the switch-over.
        let z = SERIES_LIMIT;
        let direct = 0.5 * (z * (1.0 + z * z).sqrt() - z.asinh());
        assert_relative_eq!(f2(z), direct, max_relative = 1e-13);
        assert_relative_eq!(f2(z * (1.0 - 1e-12)), direct, max_relative = 1e-11);
    }

    #[test]
    fn empty_sea_at_rest_energy() {
        let s = LevelScheme::uniform(1e15, codata()).unwrap();
        let p = eos_point(&s, 1.0, 2.0).unwrap();
        assert_eq!((p.n_e, p.p_e), (0.0, 0.0));
        let c = chandrasekhar_eos(&codata(), 1.0, 2.0).unwrap();
        assert_eq!((c.n_e, c.rho_mass, c.p_e), (0.0, 0.0, 0.0));
    }

    #[test]
    fn chandrasekhar_density_example() {
        let c = chandrasekhar_eos(&codata(), 17.0, 2.0).unwrap();
        assert_relative_eq!(c.rho_mass, 9.6e9, max_relative = 0.01);
    }

    #[test]
    fn chandrasekhar_small_x_branch_is_continuous() {
        let c = codata();
        let x = SERIES_LIMIT;
        let closed = x * (1.0 + x * x).sqrt() * (2.0 * x * x / 3.0 - 1.0) + x.asinh();
        assert_relative_eq!(chandrasekhar_shape(x), closed, max_relative = 1e-12);
        assert_relative_eq!(chandrasekhar_shape(x * (1.0 - 1e-12)), closed, max_relative = 1e-10);
        // Leading non-relativistic behaviour P ∝ x⁵.
        let a = chandrasekhar_eos(&c, (1.0 + 1e-4f64.powi(2)).sqrt(), 2.0).unwrap();
        let b = chandrasekhar_eos(&c, (1.0 + 2e-4f64.powi(2)).sqrt(), 2.0).unwrap();
        assert_relative_eq!(b.p_e / a.p_e, 32.0, max_relative = 1e-6);
    }

    #[test]
    fn uniform_identity() {
        let c = codata();
        for b in [1e13, 3e14, 2e15, 4e16] {
            let s = LevelScheme::uniform(b, c).unwrap();
            for eps in [1.0, 1.5, 3.0, 17.0, 40.0] {
                let (n_ref, p_ref) = uniform_reference(&c, b, eps).unwrap();
                let n = number_density(&s, eps).unwrap();
                let p = pressure(&s, eps).unwrap();
                assert!((n - n_ref).abs() <= 1e-10 * n_ref, "{b} {eps}: {n} vs {n_ref}");
                assert!((p - p_ref).abs() <= 1e-10 * p_ref, "{b} {eps}: {p} vs {p_ref}");
            }
        }
    }

    #[test]
    fn many_levels_approach_chandrasekhar() {
        let c = codata();
        let s = LevelScheme::uniform(1e12, c).unwrap();
        let eps = 5.0;
        assert!(max_level(&s, eps, Spin::Down).unwrap() >= 100);
        let lq = eos_point(&s, eps, 2.0).unwrap();
        let ch = chandrasekhar_eos(&c, eps, 2.0).unwrap();
        assert_relative_eq!(lq.n_e, ch.n_e, max_relative = 0.01);
        assert_relative_eq!(lq.p_e, ch.p_e, max_relative = 0.01);
    }

    #[test]
    fn tables_are_nested_and_monotone() {
        let s = LevelScheme::uniform(2e15, codata()).unwrap();
        let coarse = eos_table(&s, 2.0, 17.0, 10).unwrap();
        let fine = eos_table(&s, 2.0, 17.0, 100).unwrap();
        for (i, row) in coarse.rows.iter().enumerate() {
            assert_eq!(row, &fine.rows[10 * i]);
        }
        assert!(fine.rows.windows(2).all(|w| w[1].eps_f > w[0].eps_f && w[1].p_e >= w[0].p_e));
        assert!(eos_table(&s, 2.0, 1.0, 100).is_err());
        assert!(eos_table(&s, 2.0, 17.0, 5).is_err());
        let csv = coarse.to_csv();
        assert!(csv.starts_with("eps_F,n_e_cm3,rho_g_cc,P_erg_cc\n"));
        assert_eq!(csv.lines().count(), 12);
    }

    #[test]
    fn negative_index_admits_fewer_levels() {
        let c = codata();
        let s0 = LevelScheme::uniform(2e15, c).unwrap();
        let fc = crate::analytic::published_fit_constants(-0.4).unwrap();
        let s4 = LevelScheme::fit(fc, 2e15, c).unwrap();
        let t0 = eos_table(&s0, 2.0, 17.0, 100).unwrap();
        let t4 = eos_table(&s4, 2.0, 17.0, 100).unwrap();
        assert!(t4.occupied_levels().unwrap() < t0.occupied_levels().unwrap());
    }

    proptest! {
        #[test]
        fn density_and_pressure_monotone(eps in 1.0f64..30.0, d in 1e-6f64..1.0) {
            let s = LevelScheme::uniform(5e14, codata()).unwrap();
            prop_assert!(number_density(&s, eps + d).unwrap() >= number_density(&s, eps).unwrap());
            prop_assert!(pressure(&s, eps + d).unwrap() >= pressure(&s, eps).unwrap());
        }

        #[test]
        fn f2_increasing(z in 0.0f64..50.0, d in 1e-6f64..1.0) {
            prop_assert!(f2(z + d) > f2(z));
            prop_assert!(f2(z) >= 0.0);
        }
    }
}
