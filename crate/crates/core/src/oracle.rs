//! Independent references for the shooting solver: a finite-difference
//! matrix discretization of the radial problem, and the closed-form
//! uniform-field (n = 0) Landau radial functions.

use crate::eigensolver::{self, SolverOptions};
use crate::field::{self, FieldProfile, QuantumNumbers, Spin};
use crate::{Error, Result};

/// Default number of finite-difference unknowns.
pub const FD_POINTS: usize = 40_000;

/// Symmetric tridiagonal matrix given by its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidInput(format!(
                "tridiagonal needs off-diagonal length {} for {} diagonal entries, got {}",
                diag.len().saturating_sub(1),
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for (d, e) in self.diag[1..].iter().zip(&self.off) {
            let prev = if q == 0.0 { f64::EPSILON * e.abs().max(1.0) } else { q };
            q = d - x - e * e / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing every eigenvalue.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                (self.diag[i] - left - right, self.diag[i] + left + right)
            })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)))
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection on the Sturm count.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.diag.len() {
            return Err(Error::InvalidInput(format!(
                "matrix of order {} has no eigenvalue {k}",
                self.diag.len()
            )));
        }
        let (mut lo, mut hi) = self.gershgorin();
        while hi - lo > 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Finite-difference matrix of the radial operator
/// `−λ_e²(1/ρ)(ρR')' + (λ_e²m²/ρ² + W)R` on the staggered grid
/// `ρ_i = (i − ½)h`, symmetrized with `√ρ_i`. The half-offset grid builds the
/// regularity condition at the origin in, and `R = 0` at `ρ_max`.
pub fn fd_matrix(profile: &FieldProfile, m: i32, spin: Spin, rho_max: f64, points: usize) -> Result<Tridiagonal> {
    if points < 100 || !(rho_max > 0.0 && rho_max.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "finite-difference matrix needs >= 100 points and rho_max > 0, got {points}, {rho_max}"
        )));
    }
    let lambda2 = profile.constants().lambda_e.powi(2);
    let h = rho_max / (points as f64 + 0.5);
    let m2 = f64::from(m) * f64::from(m);
    let rho = |i: usize| (i as f64 + 0.5) * h;
    let diag = (0..points)
        .map(|i| {
            let r = rho(i);
            let flux = (r - 0.5 * h) + (r + 0.5 * h);
            lambda2 * flux / (r * h * h) + lambda2 * m2 / (r * r) + field::magnetic_potential(profile, m, spin, r)
        })
        .collect();
    let off = (0..points - 1)
        .map(|i| -lambda2 * (rho(i) + 0.5 * h) / (h * h * (rho(i) * rho(i + 1)).sqrt()))
        .collect();
    Tridiagonal::new(diag, off)
}

/// Lowest `count` eigenvalues of the finite-difference discretization at
/// fixed (m, spin), Richardson-extrapolated from `points` and `2·points`
/// unknowns (the scheme is second order). The outer boundary is placed where the shooting solver
/// would put it for a bracket comfortably above the top requested level.
pub fn fd_eigenvalues(profile: &FieldProfile, m: i32, spin: Spin, count: usize, points: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if !profile.admits_bound_states() {
        return Err(Error::InvalidInput(format!("no bound states for n = {}", profile.n())));
    }
    let top = QuantumNumbers::new(m, spin, count as u32 - 1);
    let mut alpha_hi = 2.0 * eigensolver::initial_guess(profile, top) + profile.alpha_scale();
    for _ in 0..16 {
        let grid = eigensolver::level_grid(profile, top, alpha_hi, &SolverOptions::default())?;
        let lowest = |points: usize| -> Result<Vec<f64>> {
            let matrix = fd_matrix(profile, m, spin, grid.rho_max(), points)?;
            (0..count).map(|k| matrix.eigenvalue(k)).collect()
        };
        let (coarse, fine) = (lowest(points)?, lowest(2 * points)?);
        let values: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
        if values[count - 1] < alpha_hi {
            return Ok(values);
        }
        alpha_hi *= 2.0;
    }
    Err(Error::NoBoundState {
        nu: count as u32 - 1,
        lo: 0.0,
        hi: alpha_hi,
        reason: "finite-difference box could not be made large enough".into(),
    })
}

/// Laguerre polynomial `L_ν(x)` by the three-term recurrence.
pub fn laguerre(nu: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if nu == 0 {
        return prev;
    }
    for k in 1..nu {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized (`∫R²ρ dρ = 1`) m = 0 uniform-field radial function
/// `R_ν = (√b/λ_e) e^{−ξ/2} L_ν(ξ)`, `ξ = bρ²/(2λ_e²)`, `b = B₀/B_c`.
/// Both spins share it; the sign convention is `R_ν(0) > 0`.
pub fn uniform_radial(profile: &FieldProfile, nu: u32, rho: f64) -> Result<f64> {
    if profile.n() != 0.0 {
        return Err(Error::InvalidInput(format!(
            "closed-form Landau functions need a uniform field, got n = {}",
            profile.n()
        )));
    }
    let b = profile.reduced_amplitude();
    let lambda = profile.constants().lambda_e;
    let xi = b * rho * rho / (2.0 * lambda * lambda);
    Ok(b.sqrt() / lambda * (-0.5 * xi).exp() * laguerre(nu, xi))
}

/// Closed-form `2|∫R₀ρ²R₁ dρ| = λ_e √(π/(2b))` between the two lowest m = 0
/// uniform-field levels.
pub fn uniform_displacement(profile: &FieldProfile) -> Result<f64> {
    if profile.n() != 0.0 {
        return Err(Error::InvalidInput(format!(
            "closed-form displacement needs a uniform field, got n = {}",
            profile.n()
        )));
    }
    let b = profile.reduced_amplitude();
    Ok(profile.constants().lambda_e * (std::f64::consts::PI / (2.0 * b)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::uniform_alpha;
    use crate::quadrature::trapezoid;
    use approx::assert_relative_eq;

    #[test]
    fn sturm_count_on_known_matrix() {
        // Second-difference matrix: eigenvalues 2 − 2cos(kπ/(N+1)).
        let n = 50;
        let t = Tridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        for k in [0, 7, 49] {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert_relative_eq!(t.eigenvalue(k).unwrap(), exact, max_relative = 1e-12);
        }
        assert_eq!(t.count_below(0.0), 0);
        assert_eq!(t.count_below(4.0), n);
        assert!(t.eigenvalue(n).is_err());
        assert!(Tridiagonal::new(vec![1.0; 3], vec![0.0; 3]).is_err());
    }

    #[test]
    fn fd_reproduces_uniform_levels() {
        let p = FieldProfile::new(1e15, 0.0).unwrap();
        for (spin, m) in [(Spin::Down, 0), (Spin::Up, 0), (Spin::Down, -1), (Spin::Up, 2)] {
            let values = fd_eigenvalues(&p, m, spin, 3, FD_POINTS).unwrap();
            for (nu, a) in values.iter().enumerate() {
                let exact = uniform_alpha(p.constants(), nu as u32, m, spin, 1e15);
                assert!((a - exact).abs() <= 1e-4 * exact.max(1.0), "{spin} m={m} ν={nu}: {a} vs {exact}");
            }
        }
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(laguerre(0, 3.0), 1.0);
        assert_eq!(laguerre(1, 3.0), -2.0);
        // L₂(x) = (x² − 4x + 2)/2, L₃(x) = (−x³ + 9x² − 18x + 6)/6.
        assert_relative_eq!(laguerre(2, 1.5), (2.25 - 6.0 + 2.0) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(laguerre(3, 0.7), (-0.343 + 4.41 - 12.6 + 6.0) / 6.0, max_relative = 1e-13);
    }

    #[test]
    fn uniform_radial_is_orthonormal() {
        let p = FieldProfile::new(1e16, 0.0).unwrap();
        let rho: Vec<f64> = (0..=200_000).map(|i| i as f64 * 1e-5).collect();
        let r0: Vec<f64> = rho.iter().map(|&r| uniform_radial(&p, 0, r).unwrap()).collect();
        let r1: Vec<f64> = rho.iter().map(|&r| uniform_radial(&p, 1, r).unwrap()).collect();
        let w = |f: &dyn Fn(usize) -> f64| trapezoid(&rho, &rho.iter().enumerate().map(|(i, _)| f(i)).collect::<Vec<_>>());
        assert_relative_eq!(w(&|i| r0[i] * r0[i] * rho[i]), 1.0, max_relative = 1e-7);
        assert_relative_eq!(w(&|i| r1[i] * r1[i] * rho[i]), 1.0, max_relative = 1e-7);
        assert!(w(&|i| r0[i] * r1[i] * rho[i]).abs() < 1e-7);
        let disp = 2.0 * w(&|i| r0[i] * r1[i] * rho[i] * rho[i]).abs();
        assert_relative_eq!(disp, uniform_displacement(&p).unwrap(), max_relative = 1e-7);
    }

    #[test]
    fn closed_forms_reject_nonuniform_fields() {
        let p = FieldProfile::new(1e15, 1.0).unwrap();
        assert!(uniform_radial(&p, 0, 1.0).is_err());
        assert!(uniform_displacement(&p).is_err());
    }
}
