//! Logarithmic energies of atomic and radial measures.
//!
//! For atomic measures the energy is the off-diagonal pair sum, the
//! standard discretization of the (on atoms, divergent) double integral.
//! Radial measures reduce to the one-dimensional `log max(r, s)` kernel;
//! see the [`crate::radial`] module notes for why that double sum is exact
//! for the node circle system.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::radial::{RadialMeasure, cross_log_energy};
use crate::spectra::EmpiricalMeasure;

/// Angular nodes used when a kernel clamp forces genuine 2-D integration.
const CLAMP_ANGULAR_NODES: usize = 96;

/// Measures the rate functional can be evaluated on.
pub trait DiscMeasure {
    /// Logarithmic energy `Σ(μ)`; `-inf` marks a divergent atomic energy.
    fn log_energy_value(&self) -> Result<f64>;
    /// `∫ log(1 - |z|^2) dμ`.
    fn log_one_minus_abs_sq(&self) -> Result<f64>;
    /// `∬ min(F(z, w), alpha) dμ dμ` with the pair kernel
    /// `F(z, w) = -log|z - w| - (λ-1)/2 (log(1-|z|²) + log(1-|w|²))`.
    /// Atomic measures integrate off-diagonal, matching the energy
    /// convention.
    fn clamped_pair_integral(&self, lambda: f64, alpha: f64) -> Result<f64>;
    /// Restriction to `|z| <= rmax`, renormalized; returns the cut mass.
    fn restrict(&self, rmax: f64) -> Result<(Self, f64)>
    where
        Self: Sized;
}

/// Off-diagonal pair energy of an atomic measure; `-inf` when two atoms
/// coincide exactly.
pub fn log_energy_discrete(mu: &EmpiricalMeasure) -> Result<f64> {
    let atoms = mu.atoms();
    if atoms.len() < 2 {
        return Err(Error::InvalidInput(
            "discrete energy is undefined for a single atom".into(),
        ));
    }
    let total: f64 = (0..atoms.len())
        .into_par_iter()
        .map(|i| {
            let (zi, wi) = atoms[i];
            let mut acc = 0.0;
            for &(zj, wj) in &atoms[i + 1..] {
                let d = (zi - zj).norm();
                if d == 0.0 {
                    return f64::NEG_INFINITY;
                }
                acc += wi * wj * d.ln();
            }
            acc
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    Ok(2.0 * total)
}

/// Energy of a radial measure through the `log max(r, s)` kernel.
pub fn log_energy_radial(mu: &RadialMeasure) -> f64 {
    mu.log_energy()
}

/// Energy of the signed difference `Σ(μ1 - μ2)`; nonpositive, and zero only
/// when the two tables induce the same circle system.
pub fn signed_energy(mu1: &RadialMeasure, mu2: &RadialMeasure) -> f64 {
    mu1.log_energy() - 2.0 * cross_log_energy(mu1, mu2) + mu2.log_energy()
}

/// External-field term `-(λ-1) ∫ log(1 - |z|^2) dμ`; nonnegative.
pub fn weighted_term<M: DiscMeasure>(mu: &M, lambda: f64) -> Result<f64> {
    super::constants::validate_lambda(lambda)?;
    Ok(-(lambda - 1.0) * mu.log_one_minus_abs_sq()?)
}

impl DiscMeasure for EmpiricalMeasure {
    fn log_energy_value(&self) -> Result<f64> {
        log_energy_discrete(self)
    }

    fn log_one_minus_abs_sq(&self) -> Result<f64> {
        let mut acc = 0.0;
        for &(z, w) in self.atoms() {
            let r = z.norm();
            if r >= 1.0 - 1e-15 {
                return Err(Error::SingularMeasure(format!(
                    "atom at modulus {r} makes the weighted term divergent"
                )));
            }
            acc += w * (1.0 - r * r).ln();
        }
        Ok(acc)
    }

    fn clamped_pair_integral(&self, lambda: f64, alpha: f64) -> Result<f64> {
        super::constants::validate_lambda(lambda)?;
        let atoms = self.atoms();
        if atoms.len() < 2 {
            return Err(Error::InvalidInput(
                "pair integral is undefined for a single atom".into(),
            ));
        }
        let half = 0.5 * (lambda - 1.0);
        let logs: Vec<f64> = atoms
            .iter()
            .map(|&(z, _)| {
                let r = z.norm();
                if r >= 1.0 - 1e-15 {
                    return Err(Error::SingularMeasure(format!(
                        "atom at modulus {r} makes the pair kernel divergent"
                    )));
                }
                Ok((1.0 - r * r).ln())
            })
            .collect::<Result<_>>()?;
        let mut acc = 0.0;
        for i in 0..atoms.len() {
            let (zi, wi) = atoms[i];
            for j in i + 1..atoms.len() {
                let (zj, wj) = atoms[j];
                let d = (zi - zj).norm();
                let f = if d == 0.0 {
                    f64::INFINITY
                } else {
                    -d.ln() - half * (logs[i] + logs[j])
                };
                acc += 2.0 * wi * wj * f.min(alpha);
            }
            // the diagonal keeps its finite field part; only the kernel
            // singularity is excluded, matching the off-diagonal energy
            // convention in the large-cap limit
            acc -= wi * wi * (lambda - 1.0) * logs[i];
        }
        Ok(acc)
    }

    fn restrict(&self, rmax: f64) -> Result<(Self, f64)> {
        self.restricted(rmax)
    }
}

impl DiscMeasure for RadialMeasure {
    fn log_energy_value(&self) -> Result<f64> {
        Ok(self.log_energy())
    }

    fn log_one_minus_abs_sq(&self) -> Result<f64> {
        self.log_one_minus_r_sq()
    }

    /// Clamping breaks the angular reduction, so the angle is integrated
    /// numerically: Gauss-Legendre in `u` with `theta = pi u^2`, which
    /// clusters nodes at the logarithmic diagonal singularity.
    fn clamped_pair_integral(&self, lambda: f64, alpha: f64) -> Result<f64> {
        super::constants::validate_lambda(lambda)?;
        if self.max_support_radius() >= 1.0 - 1e-15 {
            return Err(Error::SingularMeasure(
                "density carries mass at the unit circle".into(),
            ));
        }
        let charges = self.node_charges();
        let kr = self.kernel_radii();
        let raw = self.radii();
        let half = 0.5 * (lambda - 1.0);
        let logs: Vec<f64> = raw.iter().map(|&r| (1.0 - r * r).ln()).collect();
        let (u_nodes, u_weights) = gauss_legendre(CLAMP_ANGULAR_NODES);
        // map [-1, 1] -> [0, 1]
        let us: Vec<f64> = u_nodes.iter().map(|&x| 0.5 * (x + 1.0)).collect();
        let dus: Vec<f64> = u_weights.iter().map(|&w| 0.5 * w).collect();
        let cos_th: Vec<f64> = us
            .iter()
            .map(|&u| (std::f64::consts::PI * u * u).cos())
            .collect();

        let rows: Vec<f64> = (0..kr.len())
            .into_par_iter()
            .map(|i| {
                let ri = kr[i];
                let mut acc = 0.0;
                for j in 0..kr.len() {
                    let rj = kr[j];
                    let qpart = half * (logs[i] + logs[j]);
                    // (1/pi) ∫_0^pi min(F, alpha) dtheta = 2 ∫_0^1 min(F(pi u^2), alpha) u du
                    let mut ang = 0.0;
                    for (k, &u) in us.iter().enumerate() {
                        let d2 = ri * ri + rj * rj - 2.0 * ri * rj * cos_th[k];
                        let f = if d2 <= 0.0 {
                            f64::INFINITY
                        } else {
                            -0.5 * d2.ln() - qpart
                        };
                        ang += 2.0 * u * dus[k] * f.min(alpha);
                    }
                    acc += charges[j] * ang;
                }
                charges[i] * acc
            })
            .collect();
        Ok(rows.iter().sum())
    }

    fn restrict(&self, rmax: f64) -> Result<(Self, f64)> {
        self.restricted(rmax)
    }
}
