//! The large-deviation rate functional
//! `I(μ) = -Σ(μ) - (λ-1) ∫ log(1 - |z|²) dμ + B(λ)`.

use crate::error::Result;
use crate::potential::constants::constant_b;
use crate::potential::energy::DiscMeasure;

/// Measures are restricted to `|z| <= 1 - 1e-3` before energy evaluation;
/// the removed mass is reported in the [`RateReport`].
pub const EDGE_CUTOFF: f64 = 1.0 - 1e-3;

/// Itemized rate-functional evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateReport {
    /// `-Σ(μ)`; under a kernel clamp, the regularized pair integral minus
    /// the weight term, so the total identity below always holds.
    pub sigma_term: f64,
    /// `-(λ-1) ∫ log(1 - |z|²) dμ`.
    pub weight_term: f64,
    /// `B(λ)`.
    pub constant_b: f64,
    /// `sigma_term + weight_term + constant_b`, exactly.
    pub total: f64,
    /// Kernel cutoff actually applied; `+inf` when none.
    pub clamp_alpha: f64,
    /// Mass removed by the near-edge restriction.
    pub edge_mass_cut: f64,
}

/// Evaluates the rate functional on an atomic or radial measure.
///
/// With `clamp_alpha` set, the pair kernel
/// `F(z, w) = -log|z-w| - (λ-1)/2 (log(1-|z|²) + log(1-|w|²))` is capped at
/// `alpha` before integration; the clamped total is monotone nondecreasing
/// in `alpha` and converges to the unclamped value on bounded densities.
/// A divergent atomic energy propagates as a `+inf` rate.
pub fn rate_function<M: DiscMeasure>(
    mu: &M,
    lambda: f64,
    clamp_alpha: Option<f64>,
) -> Result<RateReport> {
    let b = constant_b(lambda)?;
    let (inner, edge_mass_cut) = mu.restrict(EDGE_CUTOFF)?;
    let weight_term = -(lambda - 1.0) * inner.log_one_minus_abs_sq()?;
    match clamp_alpha {
        None => {
            let sigma = inner.log_energy_value()?;
            if sigma == f64::NEG_INFINITY {
                return Ok(RateReport {
                    sigma_term: f64::INFINITY,
                    weight_term,
                    constant_b: b,
                    total: f64::INFINITY,
                    clamp_alpha: f64::INFINITY,
                    edge_mass_cut,
                });
            }
            let sigma_term = -sigma;
            Ok(RateReport {
                sigma_term,
                weight_term,
                constant_b: b,
                total: sigma_term + weight_term + b,
                clamp_alpha: f64::INFINITY,
                edge_mass_cut,
            })
        }
        Some(alpha) => {
            let pair = inner.clamped_pair_integral(lambda, alpha)?;
            Ok(RateReport {
                sigma_term: pair - weight_term,
                weight_term,
                constant_b: b,
                total: pair + b,
                clamp_alpha: alpha,
                edge_mass_cut,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;
    use crate::limit_law::LimitLaw;
    use crate::spectra::EmpiricalMeasure;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rate_vanishes_at_the_minimizer() {
        let law = LimitLaw::new(2.0).unwrap();
        let mu = law.discretized(1024).unwrap();
        let report = rate_function(&mu, 2.0, None).unwrap();
        assert!(report.total.abs() <= 0.02, "I = {}", report.total);
        assert!(report.total >= -1e-9, "discrete rate must stay nonnegative");
        assert_eq!(report.edge_mass_cut, 0.0);
        assert_eq!(
            report.total,
            report.sigma_term + report.weight_term + report.constant_b
        );
    }

    #[test]
    fn rate_decreases_under_grid_refinement() {
        let law = LimitLaw::new(2.0).unwrap();
        let coarse = rate_function(&law.discretized(512).unwrap(), 2.0, None).unwrap();
        let fine = rate_function(&law.discretized(2048).unwrap(), 2.0, None).unwrap();
        assert!(fine.total.abs() < coarse.total.abs());
    }

    #[test]
    fn circle_measure_has_strictly_positive_rate() {
        // uniform atoms on the circle of radius 1/sqrt(2): energy log R,
        // weight -log(1/2), so I = 1/2 - (log 2)/2 up to the atom gap
        let k = 4096usize;
        let radius = std::f64::consts::FRAC_1_SQRT_2;
        let eigs: Vec<Complex64> = (0..k)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                c(radius * t.cos(), radius * t.sin())
            })
            .collect();
        let mu = EmpiricalMeasure::from_eigenvalues(&eigs).unwrap();
        let report = rate_function(&mu, 2.0, None).unwrap();
        let continuum = 0.5 - 0.5 * 2.0f64.ln();
        assert!(report.total > 0.0);
        assert!(
            (report.total - continuum).abs() <= 5e-3,
            "I = {}",
            report.total
        );
    }

    #[test]
    fn coincident_atoms_give_infinite_rate() {
        let mu =
            EmpiricalMeasure::from_eigenvalues(&[c(0.2, 0.0), c(0.2, 0.0), c(-0.1, 0.4)]).unwrap();
        let report = rate_function(&mu, 2.0, None).unwrap();
        assert_eq!(report.total, f64::INFINITY);
        assert_eq!(report.sigma_term, f64::INFINITY);
    }

    #[test]
    fn clamp_is_monotone_and_converges() {
        let law = LimitLaw::new(2.0).unwrap();
        let mu = law.discretized(129).unwrap();
        let unclamped = rate_function(&mu, 2.0, None).unwrap().total;
        let mut prev = f64::NEG_INFINITY;
        for alpha in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 32.0] {
            let r = rate_function(&mu, 2.0, Some(alpha)).unwrap();
            assert_eq!(r.clamp_alpha, alpha);
            assert_eq!(r.total, r.sigma_term + r.weight_term + r.constant_b);
            assert!(r.total >= prev - 1e-12, "alpha {alpha}");
            prev = r.total;
        }
        assert!(
            (prev - unclamped).abs() <= 2e-3,
            "clamped {prev} vs {unclamped}"
        );
    }

    #[test]
    fn wrong_aspect_ratio_is_penalized() {
        let law = LimitLaw::new(2.0).unwrap();
        let mu = law.discretized(1024).unwrap();
        let mismatched = rate_function(&mu, 3.0, None).unwrap();
        assert!(mismatched.total > 0.05, "I = {}", mismatched.total);
    }

    /// The energy double sum is the exact energy of the node circle
    /// system, so discretization cannot push the rate below zero; only
    /// floating-point roundoff can, bounded well under this margin.
    const GRID_RATE_FLOOR: f64 = -1e-9;

    #[test]
    fn rate_is_nonnegative_on_random_grid_measures() {
        use rand::Rng;
        let mut rng = crate::rng::sample_stream(31, 0);
        for _ in 0..25 {
            let end = rng.random_range(0.3..(1.0 - 1e-3));
            let points = rng.random_range(32..512);
            let grid = crate::radial::uniform_grid(0.0, end, points);
            let density: Vec<f64> = (0..points).map(|_| rng.random_range(0.01..1.0)).collect();
            let mu = crate::radial::RadialMeasure::new(grid, density).unwrap();
            for lambda in [1.5, 2.0, 4.0] {
                let total = rate_function(&mu, lambda, None).unwrap().total;
                assert!(total >= GRID_RATE_FLOOR, "lambda {lambda}: I = {total}");
            }
        }
    }

    #[test]
    fn edge_mass_is_cut_and_reported() {
        // uniform on the disc: radial density 2r on [0, 1]
        let mu =
            crate::radial::RadialMeasure::from_density_fn(0.0, 1.0, 2049, |r| 2.0 * r).unwrap();
        let report = rate_function(&mu, 2.0, None).unwrap();
        assert!(report.edge_mass_cut > 0.0 && report.edge_mass_cut < 0.01);
        assert!(report.total > 0.0, "I = {}", report.total);
    }
}
