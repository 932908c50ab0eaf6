//! Shooting-and-matching solver for the reduced radial equation
//! `α u = (−λ_e² d²/dρ² + V_eff) u`.
//!
//! Each level is found in two stages. Node counting of a full outward sweep
//! brackets the ν-th eigenvalue by bisection; the bracket is then polished by
//! matching logarithmic derivatives of an outward solution (regular at the
//! origin) and an inward solution (WKB-decaying at `ρ_max`) at the outer
//! classical turning point.

mod grid;
mod numerov;
mod spectrum;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use grid::{RadialGrid, Spacing, MIN_POINTS};
pub use numerov::count_nodes;
pub use spectrum::{merge_levels, spectrum, spin_pattern, MergedLevel, Spectrum, TIE_TOLERANCE};
pub(crate) use spectrum::pattern_string;

use crate::analytic;
use crate::field::{self, FieldProfile, QuantumNumbers};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Target accuracy `|α − α_exact| / max(α_exact, 1)`.
    pub tol: f64,
    /// Points of the geometric grid.
    pub points: usize,
    /// Innermost radius, pm. Lowered automatically for very short length scales.
    pub rho_min: f64,
    /// WKB decay exponent `∫ √(V_eff − α)/λ_e dρ` required beyond the outer turning point.
    pub decay_action: f64,
    /// Minimum `V_eff(ρ_max) − α` at the top of the bracket.
    pub headroom: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            points: 20_000,
            rho_min: 1e-4,
            decay_action: 36.0,
            headroom: 50.0,
            max_iterations: 200,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(Error::InvalidInput(format!(
                "tolerance must lie in (0, 1e-3], got {}",
                self.tol
            )));
        }
        if !(self.rho_min > 0.0) || self.decay_action <= 0.0 {
            return Err(Error::InvalidInput("invalid solver options".into()));
        }
        Ok(())
    }
}

/// One bound level.
#[derive(Debug, Clone)]
pub struct EigenState {
    pub q: QuantumNumbers,
    /// Dimensionless eigenvalue `α = ε² − 1`.
    pub alpha: f64,
    /// `u(ρ) = √ρ R(ρ)` on `grid`, normalized so `∫ u² dρ = ∫ R² ρ dρ = 1`.
    pub u: Vec<f64>,
    pub grid: Arc<RadialGrid>,
    pub norm_checked: bool,
}

impl EigenState {
    /// `R(ρ) = u/√ρ`.
    pub fn r(&self) -> Vec<f64> {
        self.u
            .iter()
            .zip(self.grid.rho())
            .map(|(u, rho)| u / rho.sqrt())
            .collect()
    }

    /// `ε = E / m_e c²`.
    pub fn epsilon(&self) -> f64 {
        (1.0 + self.alpha.max(0.0)).sqrt()
    }

    pub fn energy_mev(&self, profile: &FieldProfile) -> f64 {
        profile.constants().m_e_c2 * self.epsilon()
    }

    /// `∫ |R|² ρ dρ`.
    pub fn norm(&self) -> f64 {
        let sq: Vec<f64> = self.u.iter().map(|v| v * v).collect();
        self.grid.integrate(&sq)
    }

    pub fn node_count(&self) -> u32 {
        count_nodes(&self.u)
    }
}

/// The radial problem sampled on a fixed geometric grid, ready for repeated
/// Numerov sweeps at different α.
struct Discretized<'a> {
    profile: &'a FieldProfile,
    q: QuantumNumbers,
    grid: Arc<RadialGrid>,
    /// `ρ² W(ρ)/λ_e²`, with W the field-dependent part of V_eff.
    w: Vec<f64>,
    /// `ρ²/λ_e²`.
    s: Vec<f64>,
}

impl<'a> Discretized<'a> {
    fn new(profile: &'a FieldProfile, q: QuantumNumbers, grid: Arc<RadialGrid>) -> Self {
        let lambda = profile.constants().lambda_e;
        let (w, s) = grid
            .rho()
            .iter()
            .map(|&rho| {
                let s = (rho / lambda).powi(2);
                (s * field::magnetic_potential(profile, q.m, q.spin, rho), s)
            })
            .unzip();
        Self { profile, q, grid, w, s }
    }

    fn m2(&self) -> f64 {
        f64::from(self.q.m).powi(2)
    }

    fn coefficients(&self, alpha: f64) -> Vec<f64> {
        let m2 = self.m2();
        self.w.iter().zip(&self.s).map(|(w, s)| m2 + w - alpha * s).collect()
    }

    /// Regular solution near the origin, `R ≈ ρ^{|m|}(1 + Σ a_k x^{p_k} / (p_k(p_k + 2|m|)))`
    /// with `x = ρ/λ_e` and `a_k x^{p_k}` the terms of `ρ²(W − α)/λ_e²`.
    /// Regular solution near the origin, `R = ρ^|m| exp(S)`, with `S` the
    /// Riccati series in `X = x^(n+2)` and `Y = x²`. The source terms are
    /// `x²(W − α) − m² = β²X²/(n+2)² + β·para·X − αY`, and each coefficient of
    /// `X^i Y^j` (exponent `e = i(n+2) + 2j`) follows from
    /// `e(e + 2|m|) s_e = a_e − Σ s_e1 s_e2 e1 e2` over `e1 + e2 = e`.
    /// Carrying the series to high order matters: α enters only through
    /// `αY`, which is tiny at the inner edge, so any truncation error in the
    /// β terms would otherwise masquerade as an eigenvalue shift.
    fn inner_seed(&self, alpha: f64, rho: f64) -> f64 {
        const ORDER: usize = 8;
        let n = self.profile.n();
        let p = n + 2.0;
        let beta = self.profile.beta();
        let x = rho / self.profile.constants().lambda_e;
        let abs_m = f64::from(self.q.m.unsigned_abs());
        let para = -2.0 * f64::from(self.q.m) / p + self.q.spin.sign();
        let exponent = |i: usize, j: usize| i as f64 * p + 2.0 * j as f64;
        let source = |i: usize, j: usize| match (i, j) {
            (2, 0) => beta * beta / (p * p),
            (1, 0) => beta * para,
            (0, 1) => -alpha,
            _ => 0.0,
        };
        let mut coef = [[0.0_f64; ORDER + 1]; ORDER + 1];
        let (big_x, big_y) = (x.powf(p), x * x);
        let mut s = 0.0;
        for total in 1..=ORDER {
            for i in 0..=total {
                let j = total - i;
                let mut rhs = source(i, j);
                for i1 in 0..=i {
                    for j1 in 0..=j {
                        let (i2, j2) = (i - i1, j - j1);
                        if i1 + j1 == 0 || i2 + j2 == 0 {
                            continue;
                        }
                        rhs -= coef[i1][j1] * coef[i2][j2] * exponent(i1, j1) * exponent(i2, j2);
                    }
                }
                let e = exponent(i, j);
                coef[i][j] = rhs / (e * (e + 2.0 * abs_m));
                s += coef[i][j] * big_x.powi(i as i32) * big_y.powi(j as i32);
            }
        }
        rho.powf(abs_m) * s.exp()
    }

    fn outer_seed(&self, f: &[f64]) -> (f64, f64) {
        let n = f.len();
        let h = self.grid.step();
        let kappa = (0.5 * (f[n - 1] + f[n - 2]) - 0.25).max(0.0).sqrt();
        (1.0, (h * (kappa + 0.5)).exp())
    }

    fn nodes(&self, alpha: f64) -> u32 {
        let f = self.coefficients(alpha);
        let rho = self.grid.rho();
        numerov::count_sign_changes_outward(
            &f,
            self.grid.step(),
            self.inner_seed(alpha, rho[0]),
            self.inner_seed(alpha, rho[1]),
        )
    }

    /// Outer classical turning point: last index with `V_eff < α`.
    fn match_index(&self, alpha: f64) -> usize {
        let f = self.coefficients(alpha);
        let n = f.len();
        let idx = f.iter().rposition(|&v| v < 0.25).unwrap_or_else(|| {
            // Whole grid forbidden: fall back to the bottom of the well.
            (0..n)
                .min_by(|&a, &b| {
                    let va = (f[a] - 0.25) / self.s[a];
                    let vb = (f[b] - 0.25) / self.s[b];
                    va.total_cmp(&vb)
                })
                .unwrap_or(n / 2)
        });
        idx.clamp(2, n - 3)
    }

    fn sweeps(&self, alpha: f64, mi: usize) -> (Vec<f64>, Vec<f64>) {
        let f = self.coefficients(alpha);
        let rho = self.grid.rho();
        let h = self.grid.step();
        let out = numerov::outward(
            &f,
            h,
            self.inner_seed(alpha, rho[0]),
            self.inner_seed(alpha, rho[1]),
            mi + 1,
        );
        let (y_last, y_prev) = self.outer_seed(&f);
        let inw = numerov::inward(&f, h, y_last, y_prev, mi - 1);
        (out, inw)
    }

    /// Difference of logarithmic derivatives at `mi`; changes sign at an eigenvalue.
    fn mismatch(&self, alpha: f64, mi: usize) -> f64 {
        let (out, inw) = self.sweeps(alpha, mi);
        let d_out = (out[mi + 1] - out[mi - 1]) / out[mi];
        let d_in = (inw[2] - inw[0]) / inw[1];
        d_out - d_in
    }

    fn assemble(&self, alpha: f64, mi: usize) -> Vec<f64> {
        let (out, inw) = self.sweeps(alpha, mi);
        let scale = out[mi] / inw[1];
        let mut r = out[..=mi].to_vec();
        r.extend(inw[2..].iter().map(|v| v * scale));
        r
    }
}

pub(crate) fn initial_guess(profile: &FieldProfile, q: QuantumNumbers) -> f64 {
    if q.m == 0 {
        if let Some(fc) = analytic::published_fit_constants(profile.n()) {
            return analytic::fit_alpha(&fc, profile.b0() / 1e15, q.nu, q.spin);
        }
    }
    // Uniform-field levels with the field evaluated at the natural length scale.
    let m = f64::from(q.m);
    2.0 * profile.alpha_scale()
        * (f64::from(q.nu) + m.abs() / 2.0 - m / 2.0 + 0.5 + 0.5 * q.spin.sign())
}

/// Bound on `h² max|f|`, keeping Numerov far from its `h²f/12 = 1` pole and
/// resolving the most rapid oscillation in the bracket.
const STABLE_STEP_FACTOR: f64 = 0.6;
const MAX_POINTS: usize = 4_000_000;

/// Geometric grid whose outer edge lies deep in the forbidden region for
/// every α up to `alpha_hi`.
pub fn level_grid(
    profile: &FieldProfile,
    q: QuantumNumbers,
    alpha_hi: f64,
    opts: &SolverOptions,
) -> Result<Arc<RadialGrid>> {
    let ell = profile.length_scale();
    let lambda = profile.constants().lambda_e;
    let rho_min = opts.rho_min.min(1e-3 * ell);
    let factor: f64 = 1.001;
    let limit = 1e5 * ell.max(rho_min);
    let mut rho = rho_min;
    let mut action = 0.0;
    let mut prev_gap = field::effective_potential(profile, q, rho)? - alpha_hi;
    // Largest |f| of the Numerov coefficients over the bracket, which caps
    // the usable step in ln ρ.
    let mut f_max = 0.25_f64;
    while rho < limit {
        let next = rho * factor;
        let v = field::effective_potential(profile, q, next)?;
        let gap = v - alpha_hi;
        f_max = f_max.max((next / lambda).powi(2) * (v.abs() + alpha_hi.abs()) + 1.0);
        if gap <= 0.0 {
            action = 0.0;
        } else {
            let mean = 0.5 * (gap.sqrt() + prev_gap.max(0.0).sqrt());
            action += mean / lambda * (next - rho);
        }
        rho = next;
        prev_gap = gap;
        if action >= opts.decay_action && gap >= opts.headroom {
            let span = (rho / rho_min).ln();
            let needed = (span / (STABLE_STEP_FACTOR / f_max).sqrt()).ceil() as usize + 1;
            let points = opts.points.max(needed);
            if points > MAX_POINTS {
                return Err(Error::NoBoundState {
                    nu: q.nu,
                    lo: 0.0,
                    hi: alpha_hi,
                    reason: format!("resolving alpha = {alpha_hi:.6e} needs {points} grid points"),
                });
            }
            return Ok(Arc::new(RadialGrid::geometric(rho_min, rho, points)?));
        }
    }
    Err(Error::NoBoundState {
        nu: q.nu,
        lo: 0.0,
        hi: alpha_hi,
        reason: format!("potential does not confine below alpha = {alpha_hi:.6e} within {limit:.3e} pm"),
    })
}

fn validate(profile: &FieldProfile, opts: &SolverOptions) -> Result<()> {
    if !profile.admits_bound_states() {
        return Err(Error::InvalidInput(format!(
            "no bound states are defined for n = {} (need n > -1)",
            profile.n()
        )));
    }
    opts.validate()
}

/// Solve for the level with `q.nu` nodes.
pub fn solve_level(profile: &FieldProfile, q: QuantumNumbers, opts: &SolverOptions) -> Result<EigenState> {
    validate(profile, opts)?;
    let scale = profile.alpha_scale();
    let mut hi = 1.25 * initial_guess(profile, q) + scale;
    for _ in 0..64 {
        let grid = level_grid(profile, q, hi, opts)?;
        let disc = Discretized::new(profile, q, grid);
        if disc.nodes(hi) > q.nu {
            return solve_bracketed(&disc, hi, opts);
        }
        hi *= 2.0;
    }
    Err(Error::NoBoundState {
        nu: q.nu,
        lo: 0.0,
        hi,
        reason: "could not bracket the level from above".into(),
    })
}

/// Solve on a caller-supplied geometric grid, e.g. to put several levels on
/// the same samples.
pub fn solve_on_grid(
    profile: &FieldProfile,
    q: QuantumNumbers,
    grid: Arc<RadialGrid>,
    opts: &SolverOptions,
) -> Result<EigenState> {
    validate(profile, opts)?;
    if grid.spacing() != Spacing::Geometric {
        return Err(Error::InvalidInput("the shooting solver needs a geometric grid".into()));
    }
    let scale = profile.alpha_scale();
    let disc = Discretized::new(profile, q, grid);
    let mut hi = 1.25 * initial_guess(profile, q) + scale;
    for _ in 0..64 {
        if disc.nodes(hi) > q.nu {
            return solve_bracketed(&disc, hi, opts);
        }
        hi *= 2.0;
    }
    Err(Error::NoBoundState {
        nu: q.nu,
        lo: 0.0,
        hi,
        reason: "grid too short to hold the level".into(),
    })
}

fn solve_bracketed(disc: &Discretized<'_>, mut hi: f64, opts: &SolverOptions) -> Result<EigenState> {
    let nu = disc.q.nu;
    let scale = disc.profile.alpha_scale();
    // All levels of the squared Dirac operator are non-negative.
    let mut lo = -1e-3 * scale;
    if disc.nodes(lo) > nu {
        return Err(Error::NoBoundState {
            nu,
            lo,
            hi,
            reason: "levels found below zero".into(),
        });
    }

    let narrow = |lo: &mut f64, hi: &mut f64, rel: f64| {
        let mut iterations = 0;
        while *hi - *lo > rel * hi.abs().max(scale) && iterations < opts.max_iterations {
            let mid = 0.5 * (*lo + *hi);
            if disc.nodes(mid) > nu {
                *hi = mid;
            } else {
                *lo = mid;
            }
            iterations += 1;
        }
    };

    let xtol = |a: f64| 1e-13 * a.abs().max(scale).max(1.0);
    let mut width = 1e-4;
    for _attempt in 0..6 {
        narrow(&mut lo, &mut hi, width);
        let mi = disc.match_index(0.5 * (lo + hi));
        let d_lo = disc.mismatch(lo, mi);
        let d_hi = disc.mismatch(hi, mi);
        if d_lo.is_finite() && d_hi.is_finite() && d_lo * d_hi < 0.0 {
            let orient = d_lo.signum();
            let g = |a: f64| orient * disc.mismatch(a, mi);
            let alpha = illinois(g, lo, hi, orient * d_lo, orient * d_hi, xtol, opts.max_iterations)
                .ok_or(Error::MatchingFailed {
                    nu,
                    iterations: opts.max_iterations,
                    lo,
                    hi,
                })?;
            return finish(disc, alpha, mi);
        }
        width *= 1e-2;
    }
    Err(Error::MatchingFailed {
        nu,
        iterations: opts.max_iterations,
        lo,
        hi,
    })
}

/// Bracketed secant (Illinois variant of regula falsi) for a function that
/// is positive at `a` and negative at `b`.
fn illinois<F: Fn(f64) -> f64>(
    f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    xtol: impl Fn(f64) -> f64,
    max_iterations: usize,
) -> Option<f64> {
    let mut side = 0i8;
    for _ in 0..max_iterations {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if !fc.is_finite() {
            return None;
        }
        if fc == 0.0 || (b - a) <= xtol(c) {
            return Some(c);
        }
        if fc > 0.0 {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
        if (b - a) <= xtol(c) {
            return Some(0.5 * (a + b));
        }
    }
    None
}

fn finish(disc: &Discretized<'_>, alpha: f64, mi: usize) -> Result<EigenState> {
    let r = disc.assemble(alpha, mi);
    let grid = Arc::clone(&disc.grid);
    let mut u: Vec<f64> = r.iter().zip(grid.rho()).map(|(r, rho)| r * rho.sqrt()).collect();
    let sq: Vec<f64> = u.iter().map(|v| v * v).collect();
    let norm = grid.integrate(&sq).sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::NoBoundState {
            nu: disc.q.nu,
            lo: alpha,
            hi: alpha,
            reason: "wavefunction could not be normalized".into(),
        });
    }
    let sign = if u[0] < 0.0 { -1.0 } else { 1.0 };
    u.iter_mut().for_each(|v| *v *= sign / norm);

    let mut state = EigenState {
        q: disc.q,
        alpha,
        u,
        grid,
        norm_checked: false,
    };
    state.norm_checked = (state.norm() - 1.0).abs() < 1e-6;
    let nodes = state.node_count();
    if nodes != disc.q.nu {
        return Err(Error::NoBoundState {
            nu: disc.q.nu,
            lo: alpha,
            hi: alpha,
            reason: format!("converged state has {nodes} nodes"),
        });
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Spin;
    use approx::assert_relative_eq;

    fn uniform(b0: f64) -> FieldProfile {
        FieldProfile::new(b0, 0.0).unwrap()
    }

    #[test]
    fn uniform_ground_levels() {
        let p = uniform(1e15);
        let b = p.reduced_amplitude();
        let opts = SolverOptions::default();
        let down = solve_level(&p, QuantumNumbers::new(0, Spin::Down, 0), &opts).unwrap();
        assert!(down.alpha.abs() < 1e-6, "{}", down.alpha);
        let up = solve_level(&p, QuantumNumbers::new(0, Spin::Up, 0), &opts).unwrap();
        assert_relative_eq!(up.alpha, 2.0 * b, max_relative = 1e-6);
        let neg = solve_level(&p, QuantumNumbers::new(-1, Spin::Down, 0), &opts).unwrap();
        assert_relative_eq!(neg.alpha, 2.0 * b, max_relative = 1e-6);
        assert_relative_eq!(neg.alpha, 45.31, max_relative = 1e-4);
    }

    #[test]
    fn state_invariants() {
        let p = FieldProfile::new(1e15, 2.0).unwrap();
        let s = solve_level(&p, QuantumNumbers::new(0, Spin::Up, 4), &SolverOptions::default()).unwrap();
        assert_eq!(s.node_count(), 4);
        assert!(s.norm_checked);
        assert!((s.norm() - 1.0).abs() < 1e-6);
        assert!(s.u[0] > 0.0);
        assert!(s.alpha >= 0.0);

        // Monotone decay beyond the outer turning point.
        let rho = s.grid.rho();
        let turning = rho
            .iter()
            .rposition(|&r| field::effective_potential(&p, s.q, r).unwrap() < s.alpha)
            .unwrap();
        let tail: Vec<f64> = s.u[turning + 1..].iter().map(|v| v.abs()).collect();
        let peak = tail[0];
        assert!(tail
            .windows(2)
            .all(|w| w[1] <= w[0] || w[1] < 1e-12 * peak));
    }

    #[test]
    fn node_count_matches_level_index() {
        let p = FieldProfile::new(1e15, -0.4).unwrap();
        for nu in 0..5 {
            let s = solve_level(&p, QuantumNumbers::new(0, Spin::Down, nu), &SolverOptions::default()).unwrap();
            assert_eq!(count_nodes(&s.u), nu);
        }
    }

    #[test]
    fn rejects_invalid_requests() {
        let p = FieldProfile::unrestricted(1e15, -1.1).unwrap();
        let q = QuantumNumbers::new(0, Spin::Down, 0);
        assert!(matches!(solve_level(&p, q, &SolverOptions::default()), Err(Error::InvalidInput(_))));
        let p = uniform(1e15);
        assert!(solve_level(&p, q, &SolverOptions::default().with_tol(0.1)).is_err());
        assert!(solve_level(&p, q, &SolverOptions::default().with_tol(0.0)).is_err());
    }

    #[test]
    fn grid_refinement_is_below_tolerance() {
        let opts = SolverOptions::default();
        let fine = opts.with_points(2 * opts.points);
        for (n, spin, nu) in [(2.0, Spin::Up, 3), (-0.4, Spin::Down, 2), (1.0, Spin::Up, 0)] {
            let p = FieldProfile::new(1e15, n).unwrap();
            let q = QuantumNumbers::new(0, spin, nu);
            let a = solve_level(&p, q, &opts).unwrap().alpha;
            let b = solve_level(&p, q, &fine).unwrap().alpha;
            assert!((a - b).abs() / b.max(1.0) < opts.tol, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn solving_on_shared_grid_agrees() {
        let p = FieldProfile::new(1e16, 1.0).unwrap();
        let opts = SolverOptions::default();
        let s1 = solve_level(&p, QuantumNumbers::new(0, Spin::Up, 1), &opts).unwrap();
        let s0 = solve_on_grid(&p, QuantumNumbers::new(0, Spin::Up, 0), Arc::clone(&s1.grid), &opts).unwrap();
        let alone = solve_level(&p, QuantumNumbers::new(0, Spin::Up, 0), &opts).unwrap();
        assert!(Arc::ptr_eq(&s0.grid, &s1.grid));
        assert_relative_eq!(s0.alpha, alone.alpha, max_relative = 1e-8);
    }

    #[test]
    fn illinois_finds_simple_root() {
        let root = illinois(|x| 2.0 - x * x, 0.0, 2.0, 2.0, -2.0, |_| 1e-14, 200).unwrap();
        assert_relative_eq!(root, 2f64.sqrt(), max_relative = 1e-12);
    }
}
