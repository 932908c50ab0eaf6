//! Mandelstam–Tamm minimum evolution time between the two lowest m = 0
//! levels, the transition displacement, and the resulting quantum speed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolver::{level_grid, solve_level, solve_on_grid, EigenState, SolverOptions};
use crate::field::{FieldProfile, QuantumNumbers, Spin};
use crate::units::PhysicalConstants;
use crate::{Error, Result};

/// Default non-uniformity grid of a speed sweep.
pub const DEFAULT_SWEEP: [f64; 16] = [
    -0.5, -0.4, -0.3, -0.2, -0.1, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0,
];

/// Largest normalization defect accepted by [`radial_displacement`].
pub const NORM_TOLERANCE: f64 = 1e-6;

/// How the displacement integral weights the overlap `R₀R₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DisplacementMeasure {
    /// `2|∫ R₀ ρ² R₁ dρ|`: the dipole-like operator ρ together with the 2-D
    /// volume element ρ dρ.
    #[default]
    Literal,
    /// `2|∫ R₀ ρ R₁ dρ|`: a single power of ρ. With the 2-D normalization this
    /// is the overlap of orthogonal states and vanishes.
    SingleRho,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedResult {
    pub n: f64,
    pub b0: f64,
    pub spin: Spin,
    pub alpha0: f64,
    pub alpha1: f64,
    /// Energy spread `ΔH = (E₁ − E₀)/2`, MeV.
    pub delta_h: f64,
    /// Seconds.
    pub t_min: f64,
    /// pm.
    pub rho_disp: f64,
    /// pm/s.
    pub speed: f64,
}

/// `T_min = πħ/(2ΔH)` with `ΔH = (E₁ − E₀)/2`; energies in MeV, ħ in MeV·s.
pub fn min_transition_time(e0: f64, e1: f64, hbar: f64) -> Result<f64> {
    if !(e1 > e0) || !e0.is_finite() || !e1.is_finite() {
        return Err(Error::InvalidInput(format!(
            "transition needs E1 > E0, got E0 = {e0}, E1 = {e1}"
        )));
    }
    let delta_h = 0.5 * (e1 - e0);
    Ok(std::f64::consts::PI * hbar / (2.0 * delta_h))
}

/// Displacement `2|∫ R₀ ρᵏ R₁ dρ|` between two normalized m = 0 states of
/// the same spin sampled on the same grid.
pub fn radial_displacement(s0: &EigenState, s1: &EigenState, measure: DisplacementMeasure) -> Result<f64> {
    if s0.grid.rho() != s1.grid.rho() {
        return Err(Error::InvalidInput("states are sampled on different grids".into()));
    }
    if s0.q.m != 0 || s1.q.m != 0 {
        return Err(Error::InvalidInput("displacement is defined for m = 0 states".into()));
    }
    if s0.q.spin != s1.q.spin {
        return Err(Error::InvalidInput("states have different spins".into()));
    }
    for s in [s0, s1] {
        let norm = s.norm();
        if !s.norm_checked || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "state ν = {} is not normalized (∫|R|²ρ dρ = {norm})",
                s.q.nu
            )));
        }
    }
    // With u = √ρ R: R₀ρ²R₁ = u₀u₁ρ and R₀ρR₁ = u₀u₁.
    let integrand: Vec<f64> = s0
        .u
        .iter()
        .zip(&s1.u)
        .zip(s0.grid.rho())
        .map(|((a, b), rho)| match measure {
            DisplacementMeasure::Literal => a * b * rho,
            DisplacementMeasure::SingleRho => a * b,
        })
        .collect();
    Ok(2.0 * s0.grid.integrate(&integrand).abs())
}

/// Quantum speed between the ν = 0 and ν = 1 levels at m = 0.
pub fn quantum_speed(
    profile: &FieldProfile,
    spin: Spin,
    opts: &SolverOptions,
    measure: DisplacementMeasure,
) -> Result<SpeedResult> {
    // Solve the upper level first and reuse its grid, which also holds the
    // ground state, so that the overlap integral is taken on shared samples.
    let probe = solve_level(profile, QuantumNumbers::new(0, spin, 1), opts)?;
    let grid = level_grid(profile, probe.q, probe.alpha * 1.25 + profile.alpha_scale(), opts)?;
    let s1 = solve_on_grid(profile, QuantumNumbers::new(0, spin, 1), grid.clone(), opts)?;
    let s0 = solve_on_grid(profile, QuantumNumbers::new(0, spin, 0), grid, opts)?;

    let constants = profile.constants();
    let (e0, e1) = (s0.energy_mev(profile), s1.energy_mev(profile));
    let t_min = min_transition_time(e0, e1, constants.hbar)?;
    let rho_disp = radial_displacement(&s0, &s1, measure)?;
    Ok(SpeedResult {
        n: profile.n(),
        b0: profile.b0(),
        spin,
        alpha0: s0.alpha,
        alpha1: s1.alpha,
        delta_h: 0.5 * (e1 - e0),
        t_min,
        rho_disp,
        speed: rho_disp / t_min,
    })
}

/// One result per index, in input order; failures are reported per point.
pub fn speed_sweep(
    b0: f64,
    n_values: &[f64],
    spin: Spin,
    constants: &PhysicalConstants,
    opts: &SolverOptions,
    measure: DisplacementMeasure,
) -> Vec<Result<SpeedResult>> {
    n_values
        .par_iter()
        .map(|&n| {
            let profile = FieldProfile::new(b0, n)?.with_constants(*constants);
            quantum_speed(&profile, spin, opts, measure)
        })
        .collect()
}

/// Indices of strict interior local maxima of a sequence.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::uniform_energy;
    use crate::oracle::uniform_displacement;
    use approx::assert_relative_eq;

    #[test]
    fn transition_time_definition() {
        let hbar = 2.0 / std::f64::consts::PI;
        // ΔH = πħ/2 = 1 gives T_min = 1.
        assert_relative_eq!(min_transition_time(0.0, 2.0, hbar).unwrap(), 1.0, max_relative = 1e-15);
        let t1 = min_transition_time(1.0, 3.0, 1.0).unwrap();
        let t2 = min_transition_time(1.0, 5.0, 1.0).unwrap();
        assert_relative_eq!(t1, 2.0 * t2, max_relative = 1e-15);
        assert!(min_transition_time(1.0, 1.0, 1.0).is_err());
        assert!(min_transition_time(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn uniform_field_transition_time() {
        let c = PhysicalConstants::codata();
        let e0 = uniform_energy(&c, 0, 1e16, 0.0);
        let e1 = uniform_energy(&c, 1, 1e16, 0.0);
        assert_relative_eq!(0.5 * (e1 - e0), 5.19, max_relative = 2e-3);
        assert_relative_eq!(min_transition_time(e0, e1, c.hbar).unwrap(), 1.99e-22, max_relative = 3e-3);
    }

    #[test]
    fn uniform_displacement_matches_closed_form() {
        let p = FieldProfile::new(1e16, 0.0).unwrap();
        let r = quantum_speed(&p, Spin::Down, &SolverOptions::default(), DisplacementMeasure::Literal).unwrap();
        assert_relative_eq!(r.rho_disp, uniform_displacement(&p).unwrap(), max_relative = 1e-6);
        assert_relative_eq!(r.speed, r.rho_disp / r.t_min, max_relative = 1e-15);
        let hbar = p.constants().hbar;
        assert_relative_eq!(r.t_min * r.delta_h, std::f64::consts::PI * hbar / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn single_rho_measure_vanishes() {
        let p = FieldProfile::new(1e16, 1.0).unwrap();
        let r = quantum_speed(&p, Spin::Down, &SolverOptions::default(), DisplacementMeasure::SingleRho).unwrap();
        // Orthogonality holds to the solver tolerance.
        assert!(r.rho_disp < 1e-5, "{}", r.rho_disp);
    }

    #[test]
    fn displacement_rejects_bad_pairs() {
        let p = FieldProfile::new(1e15, 0.0).unwrap();
        let opts = SolverOptions::default();
        let a = solve_level(&p, QuantumNumbers::new(0, Spin::Down, 0), &opts).unwrap();
        let b = solve_level(&p, QuantumNumbers::new(0, Spin::Down, 1), &opts).unwrap();
        // Separately solved levels live on different grids.
        assert!(radial_displacement(&a, &b, DisplacementMeasure::Literal).is_err());
        let mut c = a.clone();
        c.u.iter_mut().for_each(|v| *v *= 2.0);
        assert!(radial_displacement(&a, &c, DisplacementMeasure::Literal).is_err());
        // A state with itself: positive smoke value.
        assert!(radial_displacement(&a, &a, DisplacementMeasure::Literal).unwrap() > 0.0);
        let mut flipped = a.clone();
        flipped.u.iter_mut().for_each(|v| *v = -*v);
        assert_relative_eq!(
            radial_displacement(&a, &flipped, DisplacementMeasure::Literal).unwrap(),
            radial_displacement(&a, &a, DisplacementMeasure::Literal).unwrap()
        );
    }

    #[test]
    fn sweep_preserves_order_and_depends_on_field() {
        let c = PhysicalConstants::codata();
        let opts = SolverOptions::default();
        let sweep = speed_sweep(1e16, &[2.0, 0.0, 1.0], Spin::Down, &c, &opts, DisplacementMeasure::Literal);
        let ns: Vec<f64> = sweep.iter().map(|r| r.as_ref().unwrap().n).collect();
        assert_eq!(ns, vec![2.0, 0.0, 1.0]);
        let single = quantum_speed(&FieldProfile::new(1e16, 1.0).unwrap(), Spin::Down, &opts, DisplacementMeasure::Literal).unwrap();
        assert_eq!(sweep[2].as_ref().unwrap(), &single);
        let other = speed_sweep(1e15, &[1.0], Spin::Down, &c, &opts, DisplacementMeasure::Literal);
        assert_ne!(other[0].as_ref().unwrap().speed, single.speed);
        let bad = speed_sweep(1e16, &[-1.5], Spin::Down, &c, &opts, DisplacementMeasure::Literal);
        assert!(bad[0].is_err());
    }

    #[test]
    fn maxima_detection() {
        assert_eq!(local_maxima(&[1.0, 3.0, 2.0, 5.0, 4.0]), vec![1, 3]);
        assert!(local_maxima(&[1.0, 2.0, 3.0]).is_empty());
        assert!(local_maxima(&[]).is_empty());
    }
}
