//! Closed-form limit distribution of truncation spectra and the related
//! projection-compression mixture.
//!
//! For aspect ratio `lambda > 1` the spectra concentrate on the disc of
//! radius `1/sqrt(lambda)` with density `(lambda-1) r / (pi (1-r^2)^2)`
//! per `dr dphi`; the radial marginal is `2 (lambda-1) r / (1-r^2)^2` and
//! the radial CDF `(lambda-1) t^2 / (1-t^2)`. Compressing the unitary with
//! a rank-`n` projection instead of truncating pads the spectrum with
//! zeros, which in the limit becomes an atom of mass `1 - 1/lambda`.

use rand::Rng;

use crate::Complex64;
use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::radial::{RadialMeasure, uniform_grid};
use crate::spectra::RadialCdfTable;

/// Limit distribution of truncation spectra at a fixed aspect ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitLaw {
    lambda: f64,
    edge_radius: f64,
}

impl LimitLaw {
    /// Validates the aspect ratio and cross-checks the closed-form second
    /// radial moment against quadrature.
    pub fn new(lambda: f64) -> Result<Self> {
        crate::potential::validate_lambda(lambda)?;
        let law = Self {
            lambda,
            edge_radius: 1.0 / lambda.sqrt(),
        };
        debug_assert!((law.edge_radius * law.edge_radius * lambda - 1.0).abs() <= 1e-14);
        let closed = law.abs_sq_moment();
        let quad = adaptive_simpson(
            &|r: f64| r * r * law.radial_density(r),
            0.0,
            law.edge_radius,
            1e-12,
        );
        if (closed - quad).abs() > 1e-10 {
            return Err(Error::NumericalFailure(format!(
                "second moment closed form {closed} and quadrature {quad} disagree"
            )));
        }
        Ok(law)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Outer edge of the support, `1/sqrt(lambda)`.
    pub fn edge_radius(&self) -> f64 {
        self.edge_radius
    }

    /// Density per `dr dphi`: `(lambda-1) r / (pi (1-r^2)^2)` on the
    /// support, zero beyond.
    pub fn density(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::OutOfDomain(format!("radius {r} outside [0, 1)")));
        }
        // support membership decided up to roundoff at the edge
        if r > self.edge_radius * (1.0 + 1e-12) {
            return Ok(0.0);
        }
        let one = 1.0 - r * r;
        Ok((self.lambda - 1.0) * r / (std::f64::consts::PI * one * one))
    }

    /// Radial marginal density `2 (lambda-1) r / (1-r^2)^2` on the support.
    pub fn radial_density(&self, r: f64) -> f64 {
        if r > self.edge_radius * (1.0 + 1e-12) {
            return 0.0;
        }
        let one = 1.0 - r * r;
        2.0 * (self.lambda - 1.0) * r / (one * one)
    }

    /// Radial CDF `(lambda-1) t^2 / (1-t^2)`, clipped to one at the edge.
    pub fn radial_cdf(&self, t: f64) -> f64 {
        assert!((0.0..=1.0).contains(&t), "radius {t} outside [0, 1]");
        if t >= self.edge_radius {
            return 1.0;
        }
        (self.lambda - 1.0) * t * t / (1.0 - t * t)
    }

    /// Inverse of the radial CDF: `u -> sqrt(u / (lambda - 1 + u))`.
    pub fn radial_quantile(&self, u: f64) -> f64 {
        (u / (self.lambda - 1.0 + u)).sqrt()
    }

    /// CDF table on an increasing grid ending at 1.
    pub fn cdf_table(&self, grid: &[f64]) -> Result<RadialCdfTable> {
        let values = grid.iter().map(|&t| self.radial_cdf(t)).collect();
        RadialCdfTable::new(grid.to_vec(), values)
    }

    /// I.i.d. points with the limit radial law and uniform angle, by
    /// inverse-CDF sampling.
    pub fn sample(&self, count: usize, rng: &mut impl Rng) -> Vec<Complex64> {
        (0..count)
            .map(|_| {
                let r = self.radial_quantile(rng.random::<f64>());
                let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                Complex64::new(r * phi.cos(), r * phi.sin())
            })
            .collect()
    }

    /// Discretization of the law on a uniform `points`-node grid over
    /// `[0, edge]`, for energy and rate evaluations.
    pub fn discretized(&self, points: usize) -> Result<RadialMeasure> {
        let radii = uniform_grid(0.0, self.edge_radius, points);
        let density = radii.iter().map(|&r| self.radial_density(r)).collect();
        RadialMeasure::new(radii, density)
    }

    /// `∫ r^2 dμ = 1 + (lambda-1) log(1 - 1/lambda)`.
    pub fn abs_sq_moment(&self) -> f64 {
        1.0 + (self.lambda - 1.0) * (-1.0 / self.lambda).ln_1p()
    }
}

/// `∫ r^2 dμ` of the limit law; value in `(0, 1)`.
pub fn theoretical_abs2_moment(lambda: f64) -> Result<f64> {
    Ok(LimitLaw::new(lambda)?.abs_sq_moment())
}

/// Spectral limit of the rank-`n` compression `Q U Q`: the truncation law
/// scaled by `1/lambda` plus an atom at the origin carrying the rest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrownMixture {
    atom_mass: f64,
    law: LimitLaw,
}

impl BrownMixture {
    pub fn new(lambda: f64) -> Result<Self> {
        let law = LimitLaw::new(lambda)?;
        Ok(Self {
            atom_mass: 1.0 - 1.0 / lambda,
            law,
        })
    }

    /// Mass of the atom at zero, `1 - 1/lambda`.
    pub fn atom_mass(&self) -> f64 {
        self.atom_mass
    }

    /// Mass of the absolutely continuous part, `1/lambda`; the two masses
    /// sum to one exactly.
    pub fn continuous_mass(&self) -> f64 {
        1.0 - self.atom_mass
    }

    pub fn law(&self) -> &LimitLaw {
        &self.law
    }

    /// Radial CDF of the mixture: jumps by the atom mass at zero, then
    /// follows the rescaled truncation law.
    pub fn radial_cdf(&self, t: f64) -> f64 {
        self.atom_mass + self.continuous_mass() * self.law.radial_cdf(t)
    }

    /// Density of the continuous part per `dr dphi`:
    /// `(lambda-1) r / (pi lambda (1-r^2)^2)` on the support.
    pub fn continuous_density(&self, r: f64) -> Result<f64> {
        Ok(self.continuous_mass() * self.law.density(r)?)
    }
}

/// Convenience constructor mirroring the mixture definition.
pub fn brown_mixture(lambda: f64) -> Result<BrownMixture> {
    BrownMixture::new(lambda)
}
