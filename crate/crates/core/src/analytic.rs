//! Closed-form uniform-field levels, the variational ground-state bound and
//! the two-constant eigenvalue formula
//!
//! ```text
//! α_ν± = C₃ B₀^{2/(n+2)} (ν + C₅)^{(2+2n)/(n+2)} [1 ± C₅/(ν + C₅)]
//! ```
//!
//! with B₀ in units of 10¹⁵ G·pm⁻ⁿ.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::eigensolver::Spectrum;
use crate::field::{FieldProfile, Spin};
use crate::units::PhysicalConstants;
use crate::{Error, Result};

/// Unit of B₀ used by the fit formula, G·pm⁻ⁿ.
pub const FIT_FIELD_UNIT: f64 = 1e15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConstants {
    pub n: f64,
    pub c3: f64,
    pub c5: f64,
}

impl FitConstants {
    pub fn new(n: f64, c3: f64, c5: f64) -> Result<Self> {
        if !(n > -1.0 && c3 > 0.0 && c5 > 0.0 && c5 < 1.0) {
            return Err(Error::InvalidInput(format!(
                "fit constants need n > -1, C3 > 0, 0 < C5 < 1; got n={n}, C3={c3}, C5={c5}"
            )));
        }
        Ok(Self { n, c3, c5 })
    }
}

/// Published constants for m = 0 (B₀ in 10¹⁵ G·pm⁻ⁿ).
pub const FIT_TABLE: [FitConstants; 10] = [
    FitConstants { n: -0.5, c3: 195.66, c5: 0.484 },
    FitConstants { n: -0.4, c3: 134.63, c5: 0.486 },
    FitConstants { n: -0.3, c3: 97.0, c5: 0.488 },
    FitConstants { n: -0.2, c3: 72.5, c5: 0.4934 },
    FitConstants { n: -0.1, c3: 56.0, c5: 0.50 },
    FitConstants { n: 0.0, c3: 44.42, c5: 0.50 },
    FitConstants { n: 1.0, c3: 10.95, c5: 0.5156 },
    FitConstants { n: 2.0, c3: 5.72, c5: 0.50 },
    FitConstants { n: 3.0, c3: 3.965, c5: 0.51 },
    FitConstants { n: 4.0, c3: 3.15, c5: 0.51 },
];

/// Published spin-up ground level at B₀ = 10¹⁵ G·pm⁻ⁿ: the computed value
/// and the variational bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundLevelRow {
    pub n: f64,
    pub computed: f64,
    pub bound: f64,
}

pub const GROUND_LEVEL_TABLE: [GroundLevelRow; 10] = [
    GroundLevelRow { n: -0.5, computed: 225.83, bound: 256.70084 },
    GroundLevelRow { n: -0.4, computed: 151.124, bound: 162.464 },
    GroundLevelRow { n: -0.3, computed: 105.612, bound: 109.563 },
    GroundLevelRow { n: -0.2, computed: 76.716, bound: 77.840 },
    GroundLevelRow { n: -0.1, computed: 57.55, bound: 57.746 },
    GroundLevelRow { n: 0.0, computed: 44.4, bound: 44.418 },
    GroundLevelRow { n: 1.0, computed: 8.702, bound: 10.090 },
    GroundLevelRow { n: 2.0, computed: 3.969, bound: 5.700 },
    GroundLevelRow { n: 3.0, computed: 2.534, bound: 4.427 },
    GroundLevelRow { n: 4.0, computed: 1.907, bound: 3.953 },
];

/// Exact row of [`FIT_TABLE`] for `n`, if tabulated.
pub fn published_fit_constants(n: f64) -> Option<FitConstants> {
    FIT_TABLE.iter().copied().find(|fc| (fc.n - n).abs() < 1e-9)
}

/// Piecewise-linear interpolation of [`FIT_TABLE`] in n.
pub fn interpolate_fit_table(n: f64) -> Result<FitConstants> {
    if let Some(fc) = published_fit_constants(n) {
        return Ok(fc);
    }
    let upper = FIT_TABLE
        .iter()
        .position(|fc| fc.n > n)
        .filter(|&i| i > 0)
        .ok_or_else(|| {
            Error::InvalidInput(format!(
                "n = {n} outside the tabulated range [{}, {}]",
                FIT_TABLE[0].n,
                FIT_TABLE[FIT_TABLE.len() - 1].n
            ))
        })?;
    let (a, b) = (FIT_TABLE[upper - 1], FIT_TABLE[upper]);
    let t = (n - a.n) / (b.n - a.n);
    Ok(FitConstants {
        n,
        c3: a.c3 + t * (b.c3 - a.c3),
        c5: a.c5 + t * (b.c5 - a.c5),
    })
}

/// Uniform-field level `α = 2kλ_eB₀(ν + |m|/2 − m/2 + 1/2 ± 1/2)`.
pub fn uniform_alpha(constants: &PhysicalConstants, nu: u32, m: i32, spin: Spin, b0: f64) -> f64 {
    let m = f64::from(m);
    2.0 * (b0 / constants.b_c) * (f64::from(nu) + m.abs() / 2.0 - m / 2.0 + 0.5 + 0.5 * spin.sign())
}

/// Uniform-field energy in MeV, `E² = p_z²c² + m_e²c⁴(1 + 2νB₀/B_c)`, with
/// `pz_c` the momentum times c in MeV.
pub fn uniform_energy(constants: &PhysicalConstants, nu: u32, b0: f64, pz_c: f64) -> f64 {
    let rest = constants.m_e_c2;
    (pz_c * pz_c + rest * rest * (1.0 + 2.0 * f64::from(nu) * b0 / constants.b_c)).sqrt()
}

/// Variational upper bound on the ground level from the trial function
/// `R₀ ∝ exp(−kB₀ρⁿ⁺²/(λ_e(n+2)²))`, which is the exact spin-down ground state.
pub fn variational_ground(profile: &FieldProfile, spin: Spin) -> Result<f64> {
    if !profile.admits_bound_states() {
        return Err(Error::InvalidInput(format!(
            "variational bound needs n > -1, got {}",
            profile.n()
        )));
    }
    let n = profile.n();
    let lambda = profile.constants().lambda_e;
    // kB₀ in pm⁻ⁿ⁻¹.
    let k_b0 = profile.reduced_amplitude() / lambda;
    let spin_factor = 1.0 + spin.sign();
    let width = 2.0 * k_b0 / (lambda * (n + 2.0).powi(2));
    Ok(k_b0 * lambda * spin_factor / gamma(2.0 / (n + 2.0)) * width.powf(-n / (n + 2.0)))
}

/// Eigenvalue from the two-constant formula; `b0` in units of 10¹⁵ G·pm⁻ⁿ.
pub fn fit_alpha(fc: &FitConstants, b0: f64, nu: u32, spin: Spin) -> f64 {
    let n = fc.n;
    let shifted = f64::from(nu) + fc.c5;
    fc.c3
        * b0.powf(2.0 / (n + 2.0))
        * shifted.powf((2.0 + 2.0 * n) / (n + 2.0))
        * (1.0 + spin.sign() * fc.c5 / shifted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FitSpace {
    /// Least squares on α itself.
    #[default]
    Linear,
    /// Least squares on ln α.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub constants: FitConstants,
    /// Root-mean-square residual in the fit space.
    pub rms: f64,
    pub points: usize,
}

/// Fit (C₃, C₅) to computed m = 0 spectra of both spins.
pub fn fit_constants(down: &Spectrum, up: &Spectrum, b0: f64, space: FitSpace) -> Result<FitResult> {
    if down.levels.len() < 4 || up.levels.len() < 4 {
        return Err(Error::Fit("each spectrum needs at least 4 levels".into()));
    }
    if down.spin != Spin::Down || up.spin != Spin::Up {
        return Err(Error::Fit("expected one spin-down and one spin-up spectrum".into()));
    }
    if down.m != 0 || up.m != 0 {
        return Err(Error::Fit("the eigenvalue formula is defined for m = 0 only".into()));
    }
    if down.profile.n() != up.profile.n() || down.profile.b0() != up.profile.b0() {
        return Err(Error::Fit("spectra belong to different field profiles".into()));
    }
    fit_constants_from_alphas(down.profile.n(), b0, &down.alphas(), &up.alphas(), space)
}

/// Variable-projection least squares: for fixed C₅ the optimal C₃ is closed
/// form, leaving a one-dimensional search over C₅ ∈ (0, 1).
pub fn fit_constants_from_alphas(
    n: f64,
    b0: f64,
    down: &[f64],
    up: &[f64],
    space: FitSpace,
) -> Result<FitResult> {
    // The spin-down ground level is identically zero and carries no information.
    let samples: Vec<(u32, Spin, f64)> = down
        .iter()
        .enumerate()
        .skip(1)
        .map(|(nu, &a)| (nu as u32, Spin::Down, a))
        .chain(up.iter().enumerate().map(|(nu, &a)| (nu as u32, Spin::Up, a)))
        .filter(|&(_, _, a)| a > 0.0 && a.is_finite())
        .collect();
    if samples.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 usable levels, got {}",
            samples.len()
        )));
    }

    let shape = |c5: f64| -> Vec<f64> {
        let unit = FitConstants { n, c3: 1.0, c5 };
        samples.iter().map(|&(nu, spin, _)| fit_alpha(&unit, b0, nu, spin)).collect()
    };
    let best_c3 = |g: &[f64]| -> f64 {
        match space {
            FitSpace::Linear => {
                let num: f64 = g.iter().zip(&samples).map(|(g, s)| g * s.2).sum();
                let den: f64 = g.iter().map(|g| g * g).sum();
                num / den
            }
            FitSpace::Log => {
                let mean: f64 = g.iter().zip(&samples).map(|(g, s)| (s.2 / g).ln()).sum::<f64>()
                    / g.len() as f64;
                mean.exp()
            }
        }
    };
    let residuals = |c5: f64| -> (f64, Vec<f64>) {
        let g = shape(c5);
        let c3 = best_c3(&g);
        let r = g
            .iter()
            .zip(&samples)
            .map(|(g, s)| match space {
                FitSpace::Linear => c3 * g - s.2,
                FitSpace::Log => (c3 * g / s.2).ln(),
            })
            .collect();
        (c3, r)
    };
    let cost = |c5: f64| -> f64 { residuals(c5).1.iter().map(|r| r * r).sum() };

    // Coarse scan, then golden-section refinement around the best node.
    let nodes: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
    let best = nodes
        .iter()
        .copied()
        .min_by(|a, b| cost(*a).total_cmp(&cost(*b)))
        .ok_or_else(|| Error::Fit("empty search grid".into()))?;
    let c5 = golden_section(&cost, (best - 0.005).max(1e-6), (best + 0.005).min(1.0 - 1e-6), 1e-13);

    let (c3, r) = residuals(c5);
    if !(c3.is_finite() && c3 > 0.0) {
        return Err(Error::Fit(format!("singular fit (C3 = {c3})")));
    }
    let rms = (r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64).sqrt();
    Ok(FitResult {
        constants: FitConstants { n, c3, c5 },
        rms,
        points: r.len(),
    })
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
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
    fn uniform_alpha_examples() {
        let c = codata();
        assert_eq!(uniform_alpha(&c, 0, 0, Spin::Down, 3e15), 0.0);
        assert_relative_eq!(uniform_alpha(&c, 0, 0, Spin::Up, 1e15), 45.31, max_relative = 1e-4);
        assert_eq!(
            uniform_alpha(&c, 1, 0, Spin::Down, 1e15),
            uniform_alpha(&c, 0, 0, Spin::Up, 1e15)
        );
        // m = −1 lifts by one quantum, m = +1 does not.
        assert_relative_eq!(
            uniform_alpha(&c, 0, -1, Spin::Down, 1e15),
            uniform_alpha(&c, 0, 0, Spin::Up, 1e15)
        );
        assert_eq!(uniform_alpha(&c, 2, 1, Spin::Up, 1e15), uniform_alpha(&c, 2, 0, Spin::Up, 1e15));
    }

    #[test]
    fn uniform_energy_examples() {
        let c = codata();
        assert_relative_eq!(uniform_energy(&c, 0, 1e16, 0.0), c.m_e_c2);
        assert_relative_eq!(uniform_energy(&c, 1, c.b_c, 0.0), 3f64.sqrt() * c.m_e_c2, max_relative = 1e-14);
        assert_relative_eq!(uniform_energy(&c, 1, 1e16, 0.0) / c.m_e_c2, 21.31, max_relative = 2e-4);
        assert_relative_eq!(uniform_energy(&c, 0, 1e16, 3.0), (9.0 + c.m_e_c2.powi(2)).sqrt());
    }

    #[test]
    fn variational_spin_down_is_zero() {
        for n in [-0.5, 0.0, 1.0, 4.0] {
            let p = FieldProfile::new(1e15, n).unwrap();
            assert_eq!(variational_ground(&p, Spin::Down).unwrap(), 0.0);
        }
    }

    #[test]
    fn variational_matches_uniform_at_n0() {
        let p = FieldProfile::new(1e15, 0.0).unwrap();
        let exact = uniform_alpha(p.constants(), 0, 0, Spin::Up, 1e15);
        assert_relative_eq!(variational_ground(&p, Spin::Up).unwrap(), exact, max_relative = 1e-10);
    }

    #[test]
    fn variational_reproduces_published_bounds() {
        let paper = PhysicalConstants::paper_calibrated();
        for (n, expected) in [(0.0, 44.418), (1.0, 10.090), (4.0, 3.953), (-0.5, 256.70084)] {
            let p = FieldProfile::new(1e15, n).unwrap().with_constants(paper);
            assert_relative_eq!(variational_ground(&p, Spin::Up).unwrap(), expected, max_relative = 1e-3);
        }
        // Same rows under CODATA constants stay within 5%.
        for (n, expected) in [(0.0, 44.418), (1.0, 10.090), (4.0, 3.953)] {
            let p = FieldProfile::new(1e15, n).unwrap();
            assert_relative_eq!(variational_ground(&p, Spin::Up).unwrap(), expected, max_relative = 0.05);
        }
    }

    #[test]
    fn fit_alpha_examples() {
        let n0 = FitConstants::new(0.0, 44.42, 0.50).unwrap();
        assert_eq!(fit_alpha(&n0, 1.0, 0, Spin::Down), 0.0);
        assert_relative_eq!(fit_alpha(&n0, 1.0, 1, Spin::Down), 44.42, max_relative = 1e-12);
        let n2 = FitConstants::new(2.0, 5.72, 0.50).unwrap();
        assert_relative_eq!(fit_alpha(&n2, 1.0, 0, Spin::Up), 4.045, max_relative = 1e-3);
    }

    #[test]
    fn fit_round_trip() {
        let truth = FitConstants::new(1.0, 10.95, 0.5156).unwrap();
        let down: Vec<f64> = (0..10).map(|nu| fit_alpha(&truth, 1.0, nu, Spin::Down)).collect();
        let up: Vec<f64> = (0..10).map(|nu| fit_alpha(&truth, 1.0, nu, Spin::Up)).collect();
        for space in [FitSpace::Linear, FitSpace::Log] {
            let fit = fit_constants_from_alphas(1.0, 1.0, &down, &up, space).unwrap();
            assert_relative_eq!(fit.constants.c3, 10.95, max_relative = 1e-6);
            assert!((fit.constants.c5 - 0.5156).abs() < 1e-6);
            assert!(fit.rms < 1e-8);
        }
    }

    #[test]
    fn fit_needs_three_levels() {
        let err = fit_constants_from_alphas(0.0, 1.0, &[0.0, 1.0], &[1.0], FitSpace::Linear);
        assert!(matches!(err, Err(Error::Fit(_))));
    }

    #[test]
    fn table_lookup_and_interpolation() {
        assert_eq!(published_fit_constants(2.0).unwrap().c3, 5.72);
        assert!(published_fit_constants(2.5).is_none());
        let mid = interpolate_fit_table(-0.37).unwrap();
        assert_relative_eq!(mid.c3, 134.63 + 0.3 * (97.0 - 134.63), max_relative = 1e-12);
        assert_relative_eq!(mid.c5, 0.486 + 0.3 * (0.488 - 0.486), max_relative = 1e-12);
        assert!(interpolate_fit_table(5.0).is_err());
        assert!(interpolate_fit_table(-0.6).is_err());
        assert!(FitConstants::new(0.0, 1.0, 1.5).is_err());
    }

    proptest! {
        #[test]
        fn fit_field_exponent(n in -0.9f64..4.0, b0 in 0.1f64..10.0, nu in 0u32..10) {
            let fc = FitConstants { n, c3: 3.0, c5: 0.5 };
            let a = fit_alpha(&fc, b0, nu, Spin::Up);
            let b = fit_alpha(&fc, 2.0 * b0, nu, Spin::Up);
            prop_assert!((b / a - 2f64.powf(2.0 / (n + 2.0))).abs() < 1e-12);
        }

        #[test]
        fn variational_field_exponent(n in -0.9f64..4.0, b0 in 1e14f64..1e16) {
            let p1 = FieldProfile::new(b0, n).unwrap();
            let p2 = FieldProfile::new(2.0 * b0, n).unwrap();
            let r = variational_ground(&p2, Spin::Up).unwrap() / variational_ground(&p1, Spin::Up).unwrap();
            prop_assert!((r / 2f64.powf(2.0 / (n + 2.0)) - 1.0).abs() < 1e-12);
        }
    }
}
