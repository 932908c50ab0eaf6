//! Physical constants and unit conversions.
//!
//! Working units follow the field-profile convention used throughout the
//! crate: lengths in picometres, field amplitudes in G·pm⁻ⁿ, eigenvalues
//! dimensionless. Stellar quantities are exported in CGS.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Reduced Planck constant, MeV·s (CODATA 2018).
pub const HBAR_MEV_S: f64 = 6.582_119_569e-22;
/// Reduced Planck constant, erg·s (CODATA 2018).
pub const HBAR_ERG_S: f64 = 1.054_571_817e-27;
/// Electron mass, g (CODATA 2018).
pub const ELECTRON_MASS_G: f64 = 9.109_383_701_5e-28;
/// Electron rest energy, MeV (CODATA 2018).
pub const ELECTRON_REST_MEV: f64 = 0.510_998_950_00;
/// Speed of light, cm/s.
pub const SPEED_OF_LIGHT_CM_S: f64 = 2.997_924_58e10;
/// Elementary charge, statcoulomb.
pub const ELEMENTARY_CHARGE_ESU: f64 = 4.803_204_712_570_263e-10;
/// Newton's constant, cm³ g⁻¹ s⁻² (CODATA 2018).
pub const NEWTON_G_CGS: f64 = 6.674_30e-8;
/// Proton mass, g (CODATA 2018).
pub const PROTON_MASS_G: f64 = 1.672_621_923_69e-24;
/// Nominal solar mass, g.
pub const SOLAR_MASS_G: f64 = 1.988_47e33;
/// 1 MeV in erg (exact since the 2019 SI redefinition).
pub const MEV_TO_ERG: f64 = 1.602_176_634e-6;
/// Centimetres per picometre.
pub const CM_PER_PM: f64 = 1.0e-10;
/// Centimetres per kilometre.
pub const CM_PER_KM: f64 = 1.0e5;

/// Electron Compton length λ_e and critical field B_c implied by the
/// published eigenvalue tables (fit to their n = 0 and n = −0.5 rows).
const PAPER_COMPTON_PM: f64 = 0.378_99;
const PAPER_CRITICAL_FIELD_G: f64 = 2.0e15 / 44.418;

/// Which calibration of λ_e and B_c is in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantConvention {
    /// Everything derived from CODATA 2018.
    #[default]
    Codata,
    /// λ_e and B_c recalibrated so the published α tables are reproduced;
    /// all other constants stay CODATA.
    PaperCalibrated,
}

impl ConstantConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstantConvention::Codata => "codata",
            ConstantConvention::PaperCalibrated => "paper-calibrated",
        }
    }
}

impl std::str::FromStr for ConstantConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "codata" => Ok(ConstantConvention::Codata),
            "paper" | "paper-calibrated" => Ok(ConstantConvention::PaperCalibrated),
            other => Err(Error::InvalidInput(format!(
                "unknown constant convention `{other}` (expected codata or paper)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Compton wavelength ħ/(m_e c), pm.
    pub lambda_e: f64,
    /// Critical (Schwinger) field m_e²c³/(eħ), G.
    pub b_c: f64,
    /// Electron rest energy, MeV.
    pub m_e_c2: f64,
    /// ħ in MeV·s.
    pub hbar: f64,
    /// Speed of light, cm/s.
    pub c: f64,
    /// Newton's constant, cgs.
    pub g_newton: f64,
    /// Proton mass, g.
    pub m_p: f64,
    /// Solar mass, g.
    pub m_sun: f64,
    pub convention: ConstantConvention,
}

impl PhysicalConstants {
    pub fn codata() -> Self {
        let lambda_cm = HBAR_ERG_S / (ELECTRON_MASS_G * SPEED_OF_LIGHT_CM_S);
        let b_c = ELECTRON_MASS_G.powi(2) * SPEED_OF_LIGHT_CM_S.powi(3)
            / (ELEMENTARY_CHARGE_ESU * HBAR_ERG_S);
        Self {
            lambda_e: lambda_cm / CM_PER_PM,
            b_c,
            m_e_c2: ELECTRON_REST_MEV,
            hbar: HBAR_MEV_S,
            c: SPEED_OF_LIGHT_CM_S,
            g_newton: NEWTON_G_CGS,
            m_p: PROTON_MASS_G,
            m_sun: SOLAR_MASS_G,
            convention: ConstantConvention::Codata,
        }
    }

    pub fn paper_calibrated() -> Self {
        Self {
            lambda_e: PAPER_COMPTON_PM,
            b_c: PAPER_CRITICAL_FIELD_G,
            convention: ConstantConvention::PaperCalibrated,
            ..Self::codata()
        }
    }

    pub fn for_convention(convention: ConstantConvention) -> Self {
        match convention {
            ConstantConvention::Codata => Self::codata(),
            ConstantConvention::PaperCalibrated => Self::paper_calibrated(),
        }
    }

    /// Test hook: replace the critical field, keeping everything else.
    pub fn with_critical_field(self, b_c: f64) -> Result<Self> {
        if !(b_c.is_finite() && b_c > 0.0) {
            return Err(Error::InvalidInput(format!(
                "critical field must be positive, got {b_c}"
            )));
        }
        Ok(Self { b_c, ..self })
    }

    /// λ_e in cm.
    pub fn lambda_e_cm(&self) -> f64 {
        self.lambda_e * CM_PER_PM
    }

    /// m_e c² in erg.
    pub fn m_e_c2_erg(&self) -> f64 {
        self.m_e_c2 * MEV_TO_ERG
    }

    /// k = e/(m_e c²) expressed as 1/(B_c λ_e), in G⁻¹ pm⁻¹.
    pub fn k(&self) -> f64 {
        1.0 / (self.b_c * self.lambda_e)
    }

    /// kλ_e B₀ = B₀/B_c.
    pub fn dimensionless_field(&self, b0: f64) -> Result<f64> {
        if !(b0.is_finite() && b0 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "field amplitude must be positive, got {b0}"
            )));
        }
        Ok(b0 / self.b_c)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata()
    }
}

/// The CODATA constant set.
pub fn constants() -> PhysicalConstants {
    PhysicalConstants::codata()
}

/// kλ_e B₀ with CODATA constants.
pub fn dimensionless_field(b0: f64, _n: f64) -> Result<f64> {
    constants().dimensionless_field(b0)
}

pub fn mev_to_erg(e: f64) -> f64 {
    e * MEV_TO_ERG
}

pub fn erg_to_mev(e: f64) -> f64 {
    e / MEV_TO_ERG
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn codata_values() {
        let c = constants();
        assert_relative_eq!(c.lambda_e, 0.386_159, max_relative = 2e-6);
        assert_relative_eq!(c.b_c, 4.414e13, max_relative = 1e-4);
        assert_relative_eq!(c.m_e_c2, 0.5110, max_relative = 1e-4);
        assert_eq!(c, constants());
    }

    #[test]
    fn derived_constants_are_consistent() {
        let c = constants();
        // λ_e from MeV-based constants, independent of the cgs route above.
        let lambda_pm = c.hbar * c.c / c.m_e_c2 / CM_PER_PM;
        assert_relative_eq!(c.lambda_e, lambda_pm, max_relative = 1e-9);
        // B_c = m_e c² / (e λ_e) in Gaussian units.
        let b_c = c.m_e_c2_erg() / (ELEMENTARY_CHARGE_ESU * c.lambda_e_cm());
        assert_relative_eq!(c.b_c, b_c, max_relative = 1e-9);
        for v in [c.lambda_e, c.b_c, c.m_e_c2, c.hbar, c.c, c.g_newton, c.m_p, c.m_sun] {
            assert!(v > 0.0);
        }
    }

    #[test]
    fn dimensionless_field_examples() {
        let c = constants();
        assert_relative_eq!(dimensionless_field(1e15, 0.0).unwrap(), 22.655, max_relative = 1e-4);
        assert_relative_eq!(c.dimensionless_field(c.b_c).unwrap(), 1.0);
        assert_relative_eq!(dimensionless_field(2e15, 0.0).unwrap(), 45.31, max_relative = 1e-4);
        assert!(dimensionless_field(0.0, 0.0).is_err());
        assert!(dimensionless_field(-1e15, 0.0).is_err());
    }

    #[test]
    fn paper_calibration_and_hook() {
        let p = PhysicalConstants::paper_calibrated();
        assert_relative_eq!(2.0 * p.dimensionless_field(1e15).unwrap(), 44.418, max_relative = 1e-12);
        let c = constants().with_critical_field(4.5e13).unwrap();
        assert_eq!(c.b_c, 4.5e13);
        assert_eq!(c.lambda_e, constants().lambda_e);
        assert!(constants().with_critical_field(0.0).is_err());
        assert_eq!("paper".parse::<ConstantConvention>().unwrap(), ConstantConvention::PaperCalibrated);
        assert!("si".parse::<ConstantConvention>().is_err());
    }

    proptest! {
        #[test]
        fn energy_round_trip(e in 1e-12f64..1e12) {
            let back = erg_to_mev(mev_to_erg(e));
            prop_assert!((back - e).abs() <= 1e-12 * e);
        }

        #[test]
        fn field_is_linear(b0 in 1e10f64..1e18) {
            let f1 = dimensionless_field(b0, 0.0).unwrap();
            let f2 = dimensionless_field(2.0 * b0, 0.0).unwrap();
            prop_assert_eq!(f2, 2.0 * f1);
        }
    }
}
