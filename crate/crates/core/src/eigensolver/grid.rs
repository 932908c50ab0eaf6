use serde::{Deserialize, Serialize};

use crate::quadrature::simpson_uniform;
use crate::{Error, Result};

pub const MIN_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    Geometric,
}

/// Ordered radial sample points in pm.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    rho: Vec<f64>,
    spacing: Spacing,
    /// Δρ for uniform grids, Δ ln ρ for geometric ones.
    step: f64,
}

impl RadialGrid {
    pub fn geometric(rho_min: f64, rho_max: f64, points: usize) -> Result<Self> {
        Self::check(rho_min, rho_max, points)?;
        let step = (rho_max / rho_min).ln() / (points - 1) as f64;
        let log_min = rho_min.ln();
        let rho = (0..points).map(|i| (log_min + step * i as f64).exp()).collect();
        Ok(Self { rho, spacing: Spacing::Geometric, step })
    }

    pub fn uniform(rho_min: f64, rho_max: f64, points: usize) -> Result<Self> {
        Self::check(rho_min, rho_max, points)?;
        let step = (rho_max - rho_min) / (points - 1) as f64;
        let rho = (0..points).map(|i| rho_min + step * i as f64).collect();
        Ok(Self { rho, spacing: Spacing::Uniform, step })
    }

    fn check(rho_min: f64, rho_max: f64, points: usize) -> Result<()> {
        if !(rho_min > 0.0 && rho_max > rho_min && rho_max.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "radial grid needs 0 < rho_min < rho_max, got [{rho_min}, {rho_max}]"
            )));
        }
        if points < MIN_POINTS {
            return Err(Error::InvalidInput(format!(
                "radial grid needs at least {MIN_POINTS} points, got {points}"
            )));
        }
        Ok(())
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn rho_min(&self) -> f64 {
        self.rho[0]
    }

    pub fn rho_max(&self) -> f64 {
        self.rho[self.rho.len() - 1]
    }

    /// `∫ f(ρ) dρ` over the grid for samples `f` at the grid points.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.rho.len());
        match self.spacing {
            Spacing::Uniform => simpson_uniform(f, self.step),
            Spacing::Geometric => {
                // dρ = ρ d(ln ρ)
                let g: Vec<f64> = f.iter().zip(&self.rho).map(|(v, r)| v * r).collect();
                simpson_uniform(&g, self.step)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn geometric_grid_shape() {
        let g = RadialGrid::geometric(1e-4, 10.0, 2001).unwrap();
        assert_eq!(g.len(), 2001);
        assert_relative_eq!(g.rho_min(), 1e-4, max_relative = 1e-14);
        assert_relative_eq!(g.rho_max(), 10.0, max_relative = 1e-12);
        assert!(g.rho().windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(g.rho()[1] / g.rho()[0], g.step().exp(), max_relative = 1e-12);
    }

    #[test]
    fn invalid_grids() {
        assert!(RadialGrid::geometric(0.0, 1.0, 2000).is_err());
        assert!(RadialGrid::geometric(1.0, 1.0, 2000).is_err());
        assert!(RadialGrid::uniform(0.1, 1.0, 999).is_err());
    }

    #[test]
    fn integrates_gaussian_moment() {
        // ∫ ρ e^{−ρ²} dρ over (0, ∞) = 1/2.
        for g in [
            RadialGrid::geometric(1e-6, 12.0, 4001).unwrap(),
            RadialGrid::uniform(1e-9, 12.0, 4001).unwrap(),
        ] {
            let f: Vec<f64> = g.rho().iter().map(|r| r * (-r * r).exp()).collect();
            assert_relative_eq!(g.integrate(&f), 0.5, max_relative = 1e-9);
        }
    }
}
