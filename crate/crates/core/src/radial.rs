//! Rotation-invariant measures tabulated by a radial density.
//!
//! A [`RadialMeasure`] stores a density `rho` with respect to `dr` on an
//! increasing radius grid; the measure it represents is
//! `rho(r)/(2 pi) dr dphi`. All integrals use the trapezoid rule on the
//! stored grid.
//!
//! Logarithmic energies exploit the circular mean of the kernel: the
//! angular average of `log|z - w|` over a circle of radius `s` equals
//! `log max(|z|, s)`. The trapezoid double sum is therefore the *exact*
//! energy of a system of uniform circles carrying the node charges, so the
//! discrete energy inherits the negativity and concavity structure of the
//! continuous functional up to floating-point roundoff. A node at radius
//! zero is replaced for kernel purposes by a small pseudo-circle of radius
//! `h * e^{-2}` (`h` the first grid step), the choice that integrates a
//! constant density exactly over the corner cell.

use rayon::prelude::*;

use crate::Complex64;
use crate::error::{Error, Result};
use crate::spectra::Moments;

/// Tabulated radial density of a rotation-invariant probability measure.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialMeasure {
    radii: Vec<f64>,
    density: Vec<f64>,
    /// Trapezoid mass of the stored density; integrals divide by it, so the
    /// represented measure always has total mass exactly one.
    mass: f64,
}

fn validate_grid(radii: &[f64], density: &[f64]) -> Result<f64> {
    if radii.len() != density.len() || radii.len() < 2 {
        return Err(Error::InvalidMeasure(
            "density table needs matching radius/density lists of length >= 2".into(),
        ));
    }
    if radii[0] < 0.0 || radii[radii.len() - 1] > 1.0 {
        return Err(Error::InvalidMeasure(
            "radius grid must lie in [0, 1]".into(),
        ));
    }
    if !radii.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::InvalidMeasure(
            "radius grid must be strictly increasing".into(),
        ));
    }
    if density.iter().any(|&d| !d.is_finite() || d < 0.0) {
        return Err(Error::InvalidMeasure(
            "density must be finite and nonnegative".into(),
        ));
    }
    let mass = trapezoid_mass(radii, density);
    if mass <= 0.0 || !mass.is_finite() {
        return Err(Error::InvalidMeasure(format!(
            "density has degenerate mass {mass}"
        )));
    }
    Ok(mass)
}

fn trapezoid_mass(radii: &[f64], density: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..radii.len() {
        acc += 0.5 * (radii[i] - radii[i - 1]) * (density[i] + density[i - 1]);
    }
    acc
}

impl RadialMeasure {
    /// Builds a measure from a density table, rescaling the density so the
    /// trapezoid mass is one.
    pub fn new(radii: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        let mass = validate_grid(&radii, &density)?;
        let density = density.into_iter().map(|d| d / mass).collect::<Vec<_>>();
        let mass = trapezoid_mass(&radii, &density);
        Ok(Self {
            radii,
            density,
            mass,
        })
    }

    /// Builds a measure keeping the density values untouched; the trapezoid
    /// mass must already be one within `1e-8`.
    pub fn try_raw(radii: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        let mass = validate_grid(&radii, &density)?;
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidMeasure(format!(
                "raw density mass {mass} deviates from 1 beyond 1e-8"
            )));
        }
        Ok(Self {
            radii,
            density,
            mass,
        })
    }

    /// Samples `f` on a uniform grid over `[a, b]` and normalizes.
    pub fn from_density_fn(a: f64, b: f64, points: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let radii = uniform_grid(a, b, points);
        let density = radii.iter().map(|&r| f(r)).collect();
        Self::new(radii, density)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Trapezoid mass of the stored table (one up to roundoff).
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn support_end(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }

    /// Largest radius carrying positive density.
    pub fn max_support_radius(&self) -> f64 {
        self.radii
            .iter()
            .zip(&self.density)
            .rev()
            .find(|&(_, &d)| d > 0.0)
            .map(|(&r, _)| r)
            .unwrap_or(self.radii[0])
    }

    /// Trapezoid node charges `w_i * rho_i / mass`; they sum to one.
    pub fn node_charges(&self) -> Vec<f64> {
        let n = self.radii.len();
        let mut w = vec![0.0; n];
        for i in 1..n {
            let h = 0.5 * (self.radii[i] - self.radii[i - 1]);
            w[i - 1] += h * self.density[i - 1];
            w[i] += h * self.density[i];
        }
        for v in &mut w {
            *v /= self.mass;
        }
        w
    }

    /// Node radii as seen by the logarithmic kernel: a node at zero becomes
    /// a pseudo-circle of radius `h * e^{-2}`.
    pub fn kernel_radii(&self) -> Vec<f64> {
        let mut r = self.radii.clone();
        if r[0] == 0.0 {
            r[0] = (self.radii[1] - self.radii[0]) * (-2.0f64).exp();
        }
        r
    }

    /// Trapezoid integral of `f(r) rho(r) dr` against the normalized
    /// density.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.node_charges()
            .iter()
            .zip(&self.radii)
            .map(|(&w, &r)| w * f(r))
            .sum()
    }

    /// Moment `∫ r^{2k} dμ`.
    pub fn abs_moment(&self, two_k: u32) -> f64 {
        self.integrate(|r| r.powi(two_k as i32))
    }

    /// Radial CDF evaluated on an arbitrary increasing grid ending at 1.
    pub fn radial_cdf(&self, grid: &[f64]) -> Result<crate::spectra::RadialCdfTable> {
        let values = grid
            .iter()
            .map(|&t| {
                // cumulative trapezoid mass up to t, with partial last cell
                let mut acc = 0.0;
                for i in 1..self.radii.len() {
                    let (r0, r1) = (self.radii[i - 1], self.radii[i]);
                    if t >= r1 {
                        acc += 0.5 * (r1 - r0) * (self.density[i] + self.density[i - 1]);
                    } else if t > r0 {
                        let frac = (t - r0) / (r1 - r0);
                        let dt =
                            self.density[i - 1] + frac * (self.density[i] - self.density[i - 1]);
                        acc += 0.5 * (t - r0) * (self.density[i - 1] + dt);
                        break;
                    } else {
                        break;
                    }
                }
                (acc / self.mass).min(1.0)
            })
            .collect::<Vec<_>>();
        crate::spectra::RadialCdfTable::new(grid.to_vec(), values)
    }

    /// Restricts the measure to `r <= rmax` (inserting an interpolated node
    /// at the cut) and renormalizes. Returns the restricted measure and the
    /// removed mass.
    pub fn restricted(&self, rmax: f64) -> Result<(Self, f64)> {
        if self.support_end() <= rmax {
            return Ok((self.clone(), 0.0));
        }
        let mut radii = Vec::new();
        let mut density = Vec::new();
        for (&r, &d) in self.radii.iter().zip(&self.density) {
            if r <= rmax {
                radii.push(r);
                density.push(d);
            } else {
                break;
            }
        }
        if radii.len() < 2 {
            return Err(Error::SingularMeasure(format!(
                "no support remains at or below radius {rmax}"
            )));
        }
        let last = radii.len() - 1;
        if self.radii[last] < rmax {
            // interpolate a node exactly at the cut
            let i = last + 1;
            let frac = (rmax - self.radii[i - 1]) / (self.radii[i] - self.radii[i - 1]);
            radii.push(rmax);
            density.push(self.density[i - 1] + frac * (self.density[i] - self.density[i - 1]));
        }
        let kept = trapezoid_mass(&radii, &density) / self.mass;
        let out = Self::new(radii, density)?;
        Ok((out, (1.0 - kept).max(0.0)))
    }

    /// Inserts `r` as a grid node (linear interpolation) if absent.
    pub fn with_node(&self, r: f64) -> Result<Self> {
        if self.radii.contains(&r) || r <= self.radii[0] || r >= self.support_end() {
            return Ok(self.clone());
        }
        let mut radii = self.radii.clone();
        let mut density = self.density.clone();
        let pos = radii.partition_point(|&x| x < r);
        let frac = (r - radii[pos - 1]) / (radii[pos] - radii[pos - 1]);
        let d = density[pos - 1] + frac * (density[pos] - density[pos - 1]);
        radii.insert(pos, r);
        density.insert(pos, d);
        let mass = validate_grid(&radii, &density)?;
        Ok(Self {
            radii,
            density,
            mass,
        })
    }

    /// Logarithmic energy `Σ(μ) = ∬ log max(r, s) dν dν` of the circle
    /// system carried by the node charges.
    pub fn log_energy(&self) -> f64 {
        cross_log_energy(self, self)
    }

    /// Logarithmic potential `U^μ(t) = -∫ log max(t, s) dμ(s)` at radius `t`.
    pub fn potential_at(&self, t: f64) -> f64 {
        let charges = self.node_charges();
        let radii = self.kernel_radii();
        let mut acc = 0.0;
        for (&w, &s) in charges.iter().zip(&radii) {
            acc += w * t.max(s).ln();
        }
        -acc
    }

    /// Integral `∫ log(1 - r^2) dμ`; an error when mass sits at the unit
    /// circle where the integrand diverges.
    pub fn log_one_minus_r_sq(&self) -> Result<f64> {
        if self.max_support_radius() >= 1.0 - 1e-15 {
            return Err(Error::SingularMeasure(
                "density carries mass at the unit circle".into(),
            ));
        }
        Ok(self.integrate(|r| (1.0 - r * r).ln()))
    }
}

impl Moments for RadialMeasure {
    /// Rotation invariance kills every moment with `k1 != k2`.
    fn mixed_moment(&self, k1: u32, k2: u32) -> Complex64 {
        assert!(k1 + k2 <= crate::spectra::MAX_MOMENT_ORDER);
        if k1 != k2 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(self.abs_moment(2 * k1), 0.0)
    }
}

/// Bilinear logarithmic energy `∬ log max(r, s) dμ1 dμ2` of two circle
/// systems. Row sums are accumulated in parallel but reduced in index
/// order, so the result does not depend on thread scheduling.
pub fn cross_log_energy(mu1: &RadialMeasure, mu2: &RadialMeasure) -> f64 {
    let w1 = mu1.node_charges();
    let w2 = mu2.node_charges();
    let r1 = mu1.kernel_radii();
    let r2 = mu2.kernel_radii();
    let rows: Vec<f64> = (0..r1.len())
        .into_par_iter()
        .map(|i| {
            let ri = r1[i];
            let mut acc = 0.0;
            for (&w, &s) in w2.iter().zip(&r2) {
                acc += w * ri.max(s).ln();
            }
            w1[i] * acc
        })
        .collect();
    rows.iter().sum()
}

/// Uniform grid of `points` nodes from `a` to `b` inclusive.
pub fn uniform_grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && b > a);
    let h = (b - a) / (points - 1) as f64;
    let mut g: Vec<f64> = (0..points).map(|i| a + i as f64 * h).collect();
    g[points - 1] = b;
    g
}
