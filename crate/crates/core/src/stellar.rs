//! Newtonian hydrostatic structure of a magnetized white dwarf:
//!
//! ```text
//! d/dr (P_e + B²/8π) = −G M (ρ_e + ρ_B) / r²,     dM/dr = 4πr² (ρ_e + ρ_B)
//! ```
//!
//! with a piecewise power-law field `B(r)` and a region-dependent electron EOS.
//! The total pressure `Π = P_e + B²/8π` is the integration variable, so where
//! `B` jumps between field segments `Π` stays continuous and `P_e` jumps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{interpolate_fit_table, FitConstants, FIT_TABLE};
use crate::eos::{self, LevelScheme, DEFAULT_MU_E};
use crate::units::{PhysicalConstants, CM_PER_KM};
use crate::{Error, Result};

/// Radius unit of the field profile exponents, km.
const FIELD_LENGTH_UNIT_KM: f64 = 1.0;

/// Local Landau sums with more occupied levels than this switch to the
/// non-magnetic EOS, which they approach to well below 1%.
pub const LANDAU_LEVEL_CAP: i64 = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSegment {
    /// Inner edge, km.
    pub r_lo: f64,
    /// Outer edge, km (`f64::INFINITY` for the last segment).
    pub r_hi: f64,
    /// G.
    pub amplitude: f64,
    pub exponent: f64,
    /// Whether `r_hi` itself belongs to this segment.
    pub upper_inclusive: bool,
}

impl FieldSegment {
    /// `amplitude · (r / 1 km)^exponent`, with `0⁰ = 1`.
    fn field(&self, r_km: f64) -> f64 {
        if self.amplitude == 0.0 {
            0.0
        } else {
            self.amplitude * (r_km / FIELD_LENGTH_UNIT_KM).powf(self.exponent)
        }
    }

    fn contains(&self, r_km: f64) -> bool {
        r_km >= self.r_lo && (r_km < self.r_hi || (self.upper_inclusive && r_km == self.r_hi))
    }
}

/// Field `B(r)` built from power-law segments covering `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFieldProfile {
    pub segments: Vec<FieldSegment>,
    pub b0_central: f64,
    pub label: String,
}

/// Radii of the field profile's interface region, km.
pub const INTERFACE_INNER_KM: f64 = 850.0;
pub const INTERFACE_OUTER_KM: f64 = 900.0;
pub const INTERFACE_EXPONENT: f64 = -0.37;
pub const ENVELOPE_EXPONENT: f64 = -0.99;

impl PiecewiseFieldProfile {
    pub fn new(segments: Vec<FieldSegment>, label: impl Into<String>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidInput("field profile needs at least one segment".into()))?;
        if first.r_lo != 0.0 {
            return Err(Error::InvalidInput("first field segment must start at r = 0".into()));
        }
        if first.exponent < 0.0 && first.amplitude != 0.0 {
            return Err(Error::InvalidInput("field diverges at the centre (negative inner exponent)".into()));
        }
        for s in &segments {
            if !(s.r_hi > s.r_lo) || !s.amplitude.is_finite() || s.amplitude < 0.0 || !s.exponent.is_finite() {
                return Err(Error::InvalidInput(format!("invalid field segment {s:?}")));
            }
        }
        for w in segments.windows(2) {
            if w[0].r_hi != w[1].r_lo {
                return Err(Error::InvalidInput(format!(
                    "field segments leave a gap or overlap at {} / {} km",
                    w[0].r_hi, w[1].r_lo
                )));
            }
        }
        if segments[segments.len() - 1].r_hi != f64::INFINITY {
            return Err(Error::InvalidInput("last field segment must extend to infinity".into()));
        }
        let b0_central = first.field(0.0);
        Ok(Self {
            segments,
            b0_central,
            label: label.into(),
        })
    }

    /// The literal three-branch profile: `B₀` inside 850 km,
    /// `B₀(r/km)^−0.37` on [850, 900] km and `B₀(r/km)^−0.99` beyond.
    pub fn paper(b0: f64) -> Result<Self> {
        Self::three_branch(b0, b0, b0, "paper")
    }

    /// The same exponents with amplitudes matched so that `B` is continuous.
    pub fn paper_continuous(b0: f64) -> Result<Self> {
        let a2 = b0 * INTERFACE_INNER_KM.powf(-INTERFACE_EXPONENT);
        let a3 = a2 * INTERFACE_OUTER_KM.powf(INTERFACE_EXPONENT - ENVELOPE_EXPONENT);
        Self::three_branch(b0, a2, a3, "paper-continuous")
    }

    fn three_branch(a1: f64, a2: f64, a3: f64, label: &str) -> Result<Self> {
        Self::new(
            vec![
                FieldSegment { r_lo: 0.0, r_hi: INTERFACE_INNER_KM, amplitude: a1, exponent: 0.0, upper_inclusive: false },
                FieldSegment { r_lo: INTERFACE_INNER_KM, r_hi: INTERFACE_OUTER_KM, amplitude: a2, exponent: INTERFACE_EXPONENT, upper_inclusive: true },
                FieldSegment { r_lo: INTERFACE_OUTER_KM, r_hi: f64::INFINITY, amplitude: a3, exponent: ENVELOPE_EXPONENT, upper_inclusive: false },
            ],
            label,
        )
    }

    pub fn uniform(b: f64) -> Result<Self> {
        Self::new(
            vec![FieldSegment { r_lo: 0.0, r_hi: f64::INFINITY, amplitude: b, exponent: 0.0, upper_inclusive: false }],
            "uniform",
        )
    }

    pub fn zero() -> Self {
        Self {
            segments: vec![FieldSegment { r_lo: 0.0, r_hi: f64::INFINITY, amplitude: 0.0, exponent: 0.0, upper_inclusive: false }],
            b0_central: 0.0,
            label: "zero".into(),
        }
    }

    fn segment_at(&self, r_km: f64) -> &FieldSegment {
        self.segments
            .iter()
            .find(|s| s.contains(r_km))
            .unwrap_or(&self.segments[self.segments.len() - 1])
    }
}

/// `B(r)` in G for `r` in km.
pub fn wd_field(profile: &PiecewiseFieldProfile, r_km: f64) -> Result<f64> {
    if !(r_km.is_finite() && r_km > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r_km}")));
    }
    Ok(profile.segment_at(r_km).field(r_km))
}

/// Mass density of the field energy, `B²/(8πc²)`, g/cm³.
pub fn magnetic_density(b: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::InvalidInput(format!("field must be non-negative, got {b}")));
    }
    Ok(magnetic_pressure(b) / constants.c.powi(2))
}

/// `B²/8π`, erg/cm³.
pub fn magnetic_pressure(b: f64) -> f64 {
    b * b / (8.0 * std::f64::consts::PI)
}

/// How the electron EOS is chosen along the star.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EosMode {
    /// Chandrasekhar EOS everywhere (the field still enters the pressure
    /// balance and the density).
    NonMagnetic,
    /// Uniform-field Landau EOS at the local field everywhere.
    LocalLandau,
    /// Uniform-field Landau EOS in uniform segments, the fit-formula Landau
    /// EOS at the local field in power-law segments covered by the fit
    /// table, and the Chandrasekhar EOS elsewhere.
    #[default]
    Regional,
}

/// Electron EOS of one field segment.
#[derive(Debug, Clone, PartialEq)]
enum RegionEos {
    Chandrasekhar,
    /// Uniform-field levels at the local B.
    UniformLandau,
    /// Fit-formula levels with the local B as amplitude.
    FitLandau(FitConstants),
}

impl RegionEos {
    fn for_segment(mode: EosMode, segment: &FieldSegment) -> Result<Self> {
        if segment.amplitude == 0.0 {
            return Ok(Self::Chandrasekhar);
        }
        Ok(match mode {
            EosMode::NonMagnetic => Self::Chandrasekhar,
            EosMode::LocalLandau => Self::UniformLandau,
            EosMode::Regional => {
                let (lo, hi) = (FIT_TABLE[0].n, FIT_TABLE[FIT_TABLE.len() - 1].n);
                if segment.exponent == 0.0 {
                    Self::UniformLandau
                } else if (lo..=hi).contains(&segment.exponent) {
                    Self::FitLandau(interpolate_fit_table(segment.exponent)?)
                } else {
                    Self::Chandrasekhar
                }
            }
        })
    }

    fn scheme(&self, b: f64, constants: &PhysicalConstants) -> Result<Option<LevelScheme>> {
        match self {
            Self::Chandrasekhar => Ok(None),
            _ if b <= 0.0 => Ok(None),
            Self::UniformLandau => Ok(Some(LevelScheme::uniform(b, *constants)?)),
            Self::FitLandau(fc) => Ok(Some(LevelScheme::fit(*fc, b, *constants)?)),
        }
    }
}

/// EOS of a region frozen at one field value.
struct LocalEos<'a> {
    scheme: Option<LevelScheme>,
    constants: &'a PhysicalConstants,
    mu_e: f64,
}

impl LocalEos<'_> {
    fn point(&self, eps_f: f64) -> Result<eos::EosPoint> {
        match &self.scheme {
            Some(s) if Self::levels(s, eps_f)? <= LANDAU_LEVEL_CAP => eos::eos_point(s, eps_f, self.mu_e),
            _ => eos::chandrasekhar_eos(self.constants, eps_f, self.mu_e),
        }
    }

    fn levels(s: &LevelScheme, eps_f: f64) -> Result<i64> {
        Ok(eos::max_level(s, eps_f, crate::Spin::Down)? + eos::max_level(s, eps_f, crate::Spin::Up)? + 2)
    }

    fn pressure(&self, eps_f: f64) -> Result<f64> {
        Ok(self.point(eps_f)?.p_e)
    }

    /// ε_F with `P_e(ε_F) = p`: Newton on the closed form without a field;
    /// otherwise Newton safeguarded by bisection, using the zero-temperature
    /// identity `dP_e/dε_F = m_e c² n_e`.
    fn invert(&self, p: f64) -> Result<f64> {
        if p <= 0.0 {
            return Ok(1.0);
        }
        if self.scheme.is_none() {
            return eos::chandrasekhar_fermi_energy(self.constants, p);
        }
        let mut hi = 2.0;
        while self.pressure(hi)? < p {
            hi *= 2.0;
            if hi > 1e9 {
                return Err(Error::InvalidInput(format!("pressure {p:e} beyond the EOS range")));
            }
        }
        let mut lo = 1.0;
        let mut eps = 0.5 * (lo + hi);
        for _ in 0..200 {
            let point = self.point(eps)?;
            if point.p_e < p {
                lo = eps;
            } else {
                hi = eps;
            }
            let slope = self.constants.m_e_c2_erg() * point.n_e;
            let newton = eps - (point.p_e - p) / slope;
            let next = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - eps).abs() <= 1e-14 * eps || hi - lo <= 1e-14 * hi {
                return Ok(next);
            }
            eps = next;
        }
        Err(Error::InvalidInput(format!("Fermi energy for pressure {p:e} did not converge")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureOptions {
    /// Integration step, km.
    pub step_km: f64,
    pub mu_e: f64,
    /// Surface pressure, erg/cm³; `None` uses the local EOS at ε_F = 1 + 10⁻⁶.
    pub p_stop: Option<f64>,
    /// Give up beyond this radius, km.
    pub max_radius_km: f64,
    pub mode: EosMode,
}

impl Default for StructureOptions {
    fn default() -> Self {
        Self {
            step_km: 0.1,
            mu_e: DEFAULT_MU_E,
            p_stop: None,
            max_radius_km: 5e4,
            mode: EosMode::Regional,
        }
    }
}

/// ε_F at which the default surface pressure is evaluated.
pub const SURFACE_EPS_F: f64 = 1.0 + 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructurePoint {
    pub r_km: f64,
    pub mass_g: f64,
    /// Total pressure `P_e + B²/8π`, erg/cm³.
    pub pressure: f64,
    pub p_e: f64,
    /// `ρ_e + ρ_B`, g/cm³.
    pub rho: f64,
    pub b: f64,
    pub eps_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StellarModel {
    pub eps_f_central: f64,
    pub points: Vec<StructurePoint>,
    pub surface_r_km: f64,
    pub surface_b: f64,
    pub total_mass_g: f64,
    pub total_mass_msun: f64,
}

pub const PROFILE_CSV_HEADER: &str = "r_km,M_g,P_erg_cc,rho_g_cc,B_G";
pub const CURVE_CSV_HEADER: &str = "rho_c_proxy,mass_msun,radius_km";

impl StellarModel {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(PROFILE_CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!("{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}\n", p.r_km, p.mass_g, p.pressure, p.rho, p.b));
        }
        out
    }

    /// `∫ 4πr²ρ dr` by the trapezoid rule on the output grid, g.
    pub fn quadrature_mass(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| {
                let f = |p: &StructurePoint| 4.0 * std::f64::consts::PI * (p.r_km * CM_PER_KM).powi(2) * p.rho;
                0.5 * (f(&w[0]) + f(&w[1])) * (w[1].r_km - w[0].r_km) * CM_PER_KM
            })
            .sum()
    }
}

struct Integrator<'a> {
    field: &'a PiecewiseFieldProfile,
    constants: &'a PhysicalConstants,
    opts: StructureOptions,
}

/// Local state derived from the total pressure at radius r inside a segment.
struct Local {
    b: f64,
    p_e: f64,
    eps_f: f64,
    rho: f64,
}

impl Integrator<'_> {
    fn local_eos(&self, segment: &FieldSegment, r_km: f64) -> Result<(f64, LocalEos<'_>)> {
        let b = segment.field(r_km);
        let region = RegionEos::for_segment(self.opts.mode, segment)?;
        let eos = LocalEos {
            scheme: region.scheme(b, self.constants)?,
            constants: self.constants,
            mu_e: self.opts.mu_e,
        };
        Ok((b, eos))
    }

    fn local(&self, segment: &FieldSegment, r_km: f64, total: f64) -> Result<Local> {
        let (b, eos) = self.local_eos(segment, r_km)?;
        let p_e = total - magnetic_pressure(b);
        let eps_f = eos.invert(p_e)?;
        let rho_e = if p_e > 0.0 { eos.point(eps_f)?.rho_mass } else { 0.0 };
        Ok(Local {
            b,
            p_e,
            eps_f,
            rho: rho_e + magnetic_density(b, self.constants)?,
        })
    }

    fn p_stop(&self, segment: &FieldSegment, r_km: f64) -> Result<f64> {
        match self.opts.p_stop {
            Some(p) => Ok(p),
            None => self.local_eos(segment, r_km)?.1.pressure(SURFACE_EPS_F),
        }
    }

    /// `(dΠ/dr, dM/dr)` in cgs.
    fn derivative(&self, segment: &FieldSegment, r_km: f64, total: f64, mass: f64) -> Result<(f64, f64)> {
        let rho = self.local(segment, r_km, total)?.rho;
        let r = r_km * CM_PER_KM;
        let dp = if r > 0.0 { -self.constants.g_newton * mass * rho / (r * r) } else { 0.0 };
        Ok((dp, 4.0 * std::f64::consts::PI * r * r * rho))
    }

    fn rk4(&self, segment: &FieldSegment, r_km: f64, h_km: f64, total: f64, mass: f64) -> Result<(f64, f64)> {
        let h = h_km * CM_PER_KM;
        let (k1p, k1m) = self.derivative(segment, r_km, total, mass)?;
        let (k2p, k2m) = self.derivative(segment, r_km + 0.5 * h_km, total + 0.5 * h * k1p, mass + 0.5 * h * k1m)?;
        let (k3p, k3m) = self.derivative(segment, r_km + 0.5 * h_km, total + 0.5 * h * k2p, mass + 0.5 * h * k2m)?;
        let (k4p, k4m) = self.derivative(segment, r_km + h_km, total + h * k3p, mass + h * k3m)?;
        Ok((
            total + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
            mass + h / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m),
        ))
    }

    fn point(&self, segment: &FieldSegment, r_km: f64, total: f64, mass: f64) -> Result<StructurePoint> {
        let l = self.local(segment, r_km, total)?;
        Ok(StructurePoint {
            r_km,
            mass_g: mass,
            pressure: total,
            p_e: l.p_e,
            rho: l.rho,
            b: l.b,
            eps_f: l.eps_f,
        })
    }

    fn run(&self, eps_f_central: f64) -> Result<StellarModel> {
        let first = &self.field.segments[0];
        let (b_c, eos_c) = self.local_eos(first, 0.0)?;
        let mut total = eos_c.pressure(eps_f_central)? + magnetic_pressure(b_c);
        let mut mass = 0.0;
        let mut points = vec![self.point(first, 0.0, total, mass)?];
        if points[0].p_e <= self.p_stop(first, 0.0)? {
            return Err(Error::Structure {
                radius_km: 0.0,
                reason: format!("central eps_F = {eps_f_central} gives no pressure above the surface value"),
            });
        }

        for (index, segment) in self.field.segments.iter().enumerate() {
            let start = segment.r_lo;
            if index > 0 {
                // Π is continuous; P_e takes up the jump in B²/8π.
                let p = self.point(segment, start, total, mass)?;
                if p.p_e < 0.0 {
                    return Err(Error::Structure {
                        radius_km: start,
                        reason: format!("electron pressure would be negative ({:e}) after the field jump", p.p_e),
                    });
                }
                points.push(p);
            }
            let end = segment.r_hi.min(self.opts.max_radius_km);
            let steps = if end.is_finite() {
                ((end - start) / self.opts.step_km).ceil().max(1.0) as usize
            } else {
                usize::MAX
            };
            let h = if end.is_finite() { (end - start) / steps as f64 } else { self.opts.step_km };
            for i in 0..steps {
                let r = start + h * i as f64;
                let r_next = if i + 1 == steps { end } else { start + h * (i + 1) as f64 };
                let (next_total, next_mass) = self.rk4(segment, r, r_next - r, total, mass)?;
                let next = self.point(segment, r_next, next_total, next_mass)?;
                let stop = self.p_stop(segment, r_next)?;
                if next.p_e <= stop {
                    return Ok(self.finish(eps_f_central, points, next, segment, stop));
                }
                if next.pressure > total {
                    return Err(Error::Structure {
                        radius_km: r_next,
                        reason: "total pressure increased outward".into(),
                    });
                }
                total = next_total;
                mass = next_mass;
                points.push(next);
                if r_next >= self.opts.max_radius_km {
                    return Err(Error::Structure {
                        radius_km: r_next,
                        reason: format!(
                            "no surface within the maximum radius: electron pressure is still {:.3e} erg/cm^3 \
                             (surface value {stop:.3e}) at B = {:.3e} G",
                            next.p_e, next.b
                        ),
                    });
                }
            }
        }
        Err(Error::Structure {
            radius_km: self.opts.max_radius_km,
            reason: "no surface within the maximum radius".into(),
        })
    }

    /// Interpolate the surface linearly in P_e between the last interior
    /// point and the first point below the surface pressure.
    fn finish(
        &self,
        eps_f_central: f64,
        mut points: Vec<StructurePoint>,
        outside: StructurePoint,
        segment: &FieldSegment,
        stop: f64,
    ) -> StellarModel {
        let inside = points[points.len() - 1];
        let t = if inside.p_e > outside.p_e {
            ((inside.p_e - stop) / (inside.p_e - outside.p_e)).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let lerp = |a: f64, b: f64| a + t * (b - a);
        let r = lerp(inside.r_km, outside.r_km);
        let b = segment.field(r);
        let surface = StructurePoint {
            r_km: r,
            mass_g: lerp(inside.mass_g, outside.mass_g),
            pressure: stop + magnetic_pressure(b),
            p_e: stop,
            rho: lerp(inside.rho, outside.rho),
            b,
            eps_f: SURFACE_EPS_F,
        };
        points.push(surface);
        StellarModel {
            eps_f_central,
            surface_r_km: r,
            surface_b: b,
            total_mass_g: surface.mass_g,
            total_mass_msun: surface.mass_g / self.constants.m_sun,
            points,
        }
    }
}

/// Integrate one model outward from the centre.
pub fn integrate_structure(
    eps_f_central: f64,
    field: &PiecewiseFieldProfile,
    constants: &PhysicalConstants,
    opts: &StructureOptions,
) -> Result<StellarModel> {
    if !(eps_f_central.is_finite() && eps_f_central > 1.0) {
        return Err(Error::InvalidInput(format!("central eps_F must exceed 1, got {eps_f_central}")));
    }
    if !(opts.step_km.is_finite() && opts.step_km > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {}", opts.step_km)));
    }
    if !(opts.mu_e.is_finite() && opts.mu_e > 0.0) {
        return Err(Error::InvalidInput(format!("mu_e must be positive, got {}", opts.mu_e)));
    }
    Integrator {
        field,
        constants,
        opts: *opts,
    }
    .run(eps_f_central)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassRadiusPoint {
    /// Central ε_F, the curve parameter.
    pub eps_f_central: f64,
    pub mass_msun: f64,
    pub radius_km: f64,
    pub surface_b: f64,
}

/// One model per central ε_F, in input order; failures reported per point.
pub fn mass_radius_curve(
    eps_f_central: &[f64],
    field: &PiecewiseFieldProfile,
    constants: &PhysicalConstants,
    opts: &StructureOptions,
) -> Vec<Result<MassRadiusPoint>> {
    eps_f_central
        .par_iter()
        .map(|&eps| {
            let m = integrate_structure(eps, field, constants, opts)?;
            Ok(MassRadiusPoint {
                eps_f_central: eps,
                mass_msun: m.total_mass_msun,
                radius_km: m.surface_r_km,
                surface_b: m.surface_b,
            })
        })
        .collect()
}

pub fn curve_to_csv(points: &[MassRadiusPoint]) -> String {
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!("{:.8e},{:.8e},{:.8e}\n", p.eps_f_central, p.mass_msun, p.radius_km));
    }
    out
}
