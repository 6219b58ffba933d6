//! Radial weighted equilibrium problems.
//!
//! For a radially symmetric external field `Q` with `r Q'(r)` increasing
//! and diverging at the unit circle, the weighted-energy minimizer is
//! supported on the annulus `[r0, R0]`, where `r0` is the smallest radius
//! beyond which `Q' > 0` and `R0` solves `R0 Q'(R0) = 1`; its radial
//! density is `(r Q'(r))'`. The Frostman conditions (potential plus field
//! constant on the support, at least that constant off it) certify the
//! solution a posteriori.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::constants::validate_lambda;
use crate::radial::{RadialMeasure, uniform_grid};

/// Verification grid size used when an equilibrium result certifies itself.
const DEFAULT_VERIFY_POINTS: usize = 4096;
/// Support residual threshold for the self-certificate.
const DEFAULT_SUPPORT_TOL: f64 = 1e-6;
/// Density tables never go below this resolution.
const MIN_DENSITY_POINTS: usize = 4097;
/// And never above this one, whatever the curvature estimate says.
const MAX_DENSITY_POINTS: usize = 131_073;

/// External field of the weighted energy.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    /// `Q(r) = -(lambda - 1)/2 · log(1 - r²)`, the field under which the
    /// truncation spectra equilibrate.
    Truncation { lambda: f64 },
    /// Arbitrary radial field tabulated as `Q(r)` and `Q'(r)` on a grid.
    Tabulated {
        radii: Vec<f64>,
        q: Vec<f64>,
        q_prime: Vec<f64>,
    },
}

impl WeightSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Truncation { lambda } => validate_lambda(*lambda),
            Self::Tabulated { radii, q, q_prime } => {
                if radii.len() < 3 || radii.len() != q.len() || radii.len() != q_prime.len() {
                    return Err(Error::WeightCondition(
                        "tabulated weight needs radii, Q and Q' lists of equal length >= 3".into(),
                    ));
                }
                if radii[0] < 0.0 || radii[radii.len() - 1] >= 1.0 {
                    return Err(Error::WeightCondition(
                        "tabulated weight grid must lie inside [0, 1)".into(),
                    ));
                }
                if !radii.windows(2).all(|w| w[1] > w[0]) {
                    return Err(Error::WeightCondition(
                        "tabulated weight grid must be strictly increasing".into(),
                    ));
                }
                let g: Vec<f64> = radii.iter().zip(q_prime).map(|(&r, &qp)| r * qp).collect();
                if !g.windows(2).all(|w| w[1] >= w[0] - 1e-12) {
                    return Err(Error::WeightCondition(
                        "rQ'(r) must be nondecreasing on the grid".into(),
                    ));
                }
                if g[g.len() - 1] <= 1.0 {
                    return Err(Error::WeightCondition(
                        "rQ'(r) must exceed 1 before the unit circle".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Field value `Q(r)`; tabulated fields interpolate linearly and clamp
    /// to their end values.
    pub fn q(&self, r: f64) -> f64 {
        match self {
            Self::Truncation { lambda } => -0.5 * (lambda - 1.0) * (1.0 - r * r).ln(),
            Self::Tabulated { radii, q, .. } => interp(radii, q, r),
        }
    }

    /// `r Q'(r)`, the monotone function whose unit level set is the outer
    /// support radius.
    pub fn r_qprime(&self, r: f64) -> f64 {
        match self {
            Self::Truncation { lambda } => (lambda - 1.0) * r * r / (1.0 - r * r),
            Self::Tabulated { radii, q_prime, .. } => r * interp(radii, q_prime, r),
        }
    }

    fn upper_bracket(&self) -> f64 {
        match self {
            Self::Truncation { .. } => 1.0 - 1e-9,
            Self::Tabulated { radii, .. } => radii[radii.len() - 1],
        }
    }
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let i = xs.partition_point(|&v| v < x);
    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + t * (ys[i] - ys[i - 1])
}

fn central_differences(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut d = vec![0.0; n];
    d[0] = (ys[1] - ys[0]) / (xs[1] - xs[0]);
    d[n - 1] = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
    for i in 1..n - 1 {
        d[i] = (ys[i + 1] - ys[i - 1]) / (xs[i + 1] - xs[i - 1]);
    }
    d
}

/// Solved equilibrium problem with its self-certificate numbers.
#[derive(Clone, Debug)]
pub struct EquilibriumResult {
    /// Inner support radius `r0`.
    pub inner_radius: f64,
    /// Outer support radius `R0`, the root of `r Q'(r) = 1`.
    pub outer_radius: f64,
    /// Radial density `(r Q'(r))'` on `[r0, R0]`.
    pub density: RadialMeasure,
    /// Mean of `U^σ + Q` over support nodes of the default certificate.
    pub frostman_constant: f64,
    /// Largest `|U^σ + Q - F|` over support nodes.
    pub max_residual_on_support: f64,
    /// Smallest `U^σ + Q - F` over off-support nodes.
    pub min_slack_off_support: f64,
}

/// Frostman-condition check of a candidate equilibrium measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrostmanCertificate {
    /// Mean of `U^σ + Q` over the support nodes.
    pub constant: f64,
    pub max_residual_on_support: f64,
    pub min_slack_off_support: f64,
    pub tol_support: f64,
    /// Residual within `tol_support` on the support and slack no worse
    /// than `-tol_support` off it.
    pub passes: bool,
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    // assumes f(lo) <= 0 <= f(hi)
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Estimates a uniform step keeping the trapezoid mass defect of the
/// analytic built-in density below ~2e-9, so the stored values need no
/// rescaling.
fn builtin_density_points(lambda: f64, r0: f64, big_r: f64) -> usize {
    let rho_prime = |r: f64| {
        let one: f64 = 1.0 - r * r;
        2.0 * (lambda - 1.0) * (1.0 + 3.0 * r * r) / (one * one * one)
    };
    let curvature = (rho_prime(big_r) - rho_prime(r0)).abs().max(1.0);
    let h = (12.0 * 2e-9 / curvature).sqrt();
    let n = ((big_r - r0) / h).ceil() as usize + 1;
    n.clamp(MIN_DENSITY_POINTS, MAX_DENSITY_POINTS)
}

/// Solves the weighted equilibrium problem for a valid radial field.
///
/// `tol` controls the bisections for the support radii (default use:
/// `1e-12`). The returned density table contains `R0` as its final node.
pub fn equilibrium_measure(weight: &WeightSpec, tol: f64) -> Result<EquilibriumResult> {
    weight.validate()?;
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }

    let hi = weight.upper_bracket();
    // r0: the last zero of the monotone rQ'(r), or 0 when the field pushes
    // outward everywhere.
    let inner_radius = if weight.r_qprime(hi) <= 0.0 {
        return Err(Error::WeightCondition(
            "rQ'(r) never becomes positive".into(),
        ));
    } else if weight.r_qprime(tol.min(1e-6_f64)) >= 0.0 {
        0.0
    } else {
        bisect(|r| weight.r_qprime(r), 0.0, hi, tol)
    };

    // R0: unique root of rQ'(r) = 1 above r0.
    if weight.r_qprime(hi) <= 1.0 {
        return Err(Error::WeightCondition(
            "rQ'(r) must exceed 1 before the unit circle".into(),
        ));
    }
    let outer_radius = bisect(|r| weight.r_qprime(r) - 1.0, inner_radius, hi, tol);

    let density = match weight {
        WeightSpec::Truncation { lambda } => {
            let points = builtin_density_points(*lambda, inner_radius, outer_radius);
            let radii = uniform_grid(inner_radius, outer_radius, points);
            let values: Vec<f64> = radii
                .iter()
                .map(|&r| {
                    let one = 1.0 - r * r;
                    2.0 * (lambda - 1.0) * r / (one * one)
                })
                .collect();
            // analytic values kept verbatim when the grid is fine enough
            RadialMeasure::try_raw(radii.clone(), values.clone())
                .or_else(|_| RadialMeasure::new(radii, values))?
        }
        WeightSpec::Tabulated {
            radii: table,
            q_prime,
            ..
        } => {
            // density (rQ')' by central differences on the weight table
            let g: Vec<f64> = table.iter().zip(q_prime).map(|(&x, &qp)| x * qp).collect();
            let derivative = central_differences(table, &g);
            let mut radii: Vec<f64> = table
                .iter()
                .copied()
                .filter(|&r| r > inner_radius && r < outer_radius)
                .collect();
            radii.insert(0, inner_radius);
            radii.push(outer_radius);
            if radii.len() < MIN_DENSITY_POINTS {
                radii = uniform_grid(inner_radius, outer_radius, MIN_DENSITY_POINTS);
            }
            let values: Vec<f64> = radii
                .iter()
                .map(|&r| interp(table, &derivative, r).max(0.0))
                .collect();
            RadialMeasure::new(radii, values)?
        }
    };

    if (density.mass() - 1.0).abs() > (10.0 * tol).max(1e-8) {
        return Err(Error::NumericalFailure(format!(
            "equilibrium density mass {} not within tolerance of 1",
            density.mass()
        )));
    }

    let mut result = EquilibriumResult {
        inner_radius,
        outer_radius,
        density,
        frostman_constant: f64::NAN,
        max_residual_on_support: f64::NAN,
        min_slack_off_support: f64::NAN,
    };
    let grid = default_verify_grid(&result, weight);
    let cert = verify_equilibrium(&result, weight, &grid, DEFAULT_SUPPORT_TOL)?;
    result.frostman_constant = cert.constant;
    result.max_residual_on_support = cert.max_residual_on_support;
    result.min_slack_off_support = cert.min_slack_off_support;
    Ok(result)
}

fn default_verify_grid(result: &EquilibriumResult, weight: &WeightSpec) -> Vec<f64> {
    let end = match weight {
        WeightSpec::Truncation { .. } => 1.0 - 1e-3,
        WeightSpec::Tabulated { radii, .. } => (1.0 - 1e-3_f64).min(radii[radii.len() - 1]),
    };
    let mut grid = uniform_grid(0.0, end, DEFAULT_VERIFY_POINTS);
    for r in [result.inner_radius, result.outer_radius] {
        if r > 0.0 && r < end && !grid.contains(&r) {
            grid.push(r);
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid
}

/// Checks the Frostman conditions of a candidate equilibrium measure on a
/// radius grid covering `[0, 1 - 1e-3]` (or the tabulated field's reach).
/// A failing certificate is a valid report, not an error.
pub fn verify_equilibrium(
    sigma: &EquilibriumResult,
    weight: &WeightSpec,
    grid: &[f64],
    tol_support: f64,
) -> Result<FrostmanCertificate> {
    weight.validate()?;
    if grid.len() < 8 || !grid.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::InvalidInput(
            "verification grid must be increasing".into(),
        ));
    }
    if grid[0] > 1e-9 {
        return Err(Error::InvalidInput(
            "verification grid must start at 0".into(),
        ));
    }

    let charges = sigma.density.node_charges();
    let kernel_radii = sigma.density.kernel_radii();
    let field_plus_potential: Vec<f64> = grid
        .par_iter()
        .map(|&t| {
            let mut pot = 0.0;
            for (&w, &s) in charges.iter().zip(&kernel_radii) {
                pot += w * t.max(s).ln();
            }
            -pot + weight.q(t)
        })
        .collect();

    let on_support = |t: f64| t >= sigma.inner_radius - 1e-12 && t <= sigma.outer_radius + 1e-12;
    let support: Vec<f64> = grid
        .iter()
        .zip(&field_plus_potential)
        .filter(|&(&t, _)| on_support(t))
        .map(|(_, &v)| v)
        .collect();
    if support.is_empty() {
        return Err(Error::InvalidInput(
            "verification grid misses the support".into(),
        ));
    }
    let constant = support.iter().sum::<f64>() / support.len() as f64;
    let max_residual_on_support = support
        .iter()
        .map(|v| (v - constant).abs())
        .fold(0.0, f64::max);
    let min_slack_off_support = grid
        .iter()
        .zip(&field_plus_potential)
        .filter(|&(&t, _)| !on_support(t))
        .map(|(_, &v)| v - constant)
        .fold(f64::INFINITY, f64::min);

    Ok(FrostmanCertificate {
        constant,
        max_residual_on_support,
        min_slack_off_support,
        tol_support,
        passes: max_residual_on_support <= tol_support && min_slack_off_support >= -tol_support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_outer_radius_is_inverse_sqrt_lambda() {
        for lambda in [1.5, 2.0, 4.0] {
            let res = equilibrium_measure(&WeightSpec::Truncation { lambda }, 1e-12).unwrap();
            assert_eq!(res.inner_radius, 0.0);
            let expected = 1.0 / lambda.sqrt();
            assert!(
                (res.outer_radius - expected).abs() <= 1e-10,
                "lambda {lambda}: R0 = {}",
                res.outer_radius
            );
        }
    }

    #[test]
    fn builtin_density_matches_closed_form_pointwise() {
        let lambda = 2.0;
        let res = equilibrium_measure(&WeightSpec::Truncation { lambda }, 1e-12).unwrap();
        let mut sup = 0.0f64;
        for (&r, &d) in res.density.radii().iter().zip(res.density.density()) {
            let one = 1.0 - r * r;
            let expected = 2.0 * (lambda - 1.0) * r / (one * one);
            sup = sup.max((d - expected).abs());
        }
        assert!(sup <= 1e-8, "sup density error {sup:.3e}");
    }

    #[test]
    fn frostman_certificate_passes_for_builtin_weight() {
        let lambda = 2.0;
        let res = equilibrium_measure(&WeightSpec::Truncation { lambda }, 1e-12).unwrap();
        assert!(
            res.max_residual_on_support <= 1e-6,
            "{}",
            res.max_residual_on_support
        );
        assert!(
            res.min_slack_off_support >= -1e-6,
            "{}",
            res.min_slack_off_support
        );
        // F = Q(R0) - log R0
        let expected = -0.5 * (lambda - 1.0) * (1.0 - 1.0 / lambda).ln() + 0.5 * lambda.ln();
        assert!(
            (res.frostman_constant - expected).abs() <= 1e-6,
            "F = {} vs {expected}",
            res.frostman_constant
        );
    }

    #[test]
    fn off_support_slack_is_strictly_positive_away_from_the_edge() {
        let lambda = 2.0;
        let res = equilibrium_measure(&WeightSpec::Truncation { lambda }, 1e-12).unwrap();
        let weight = WeightSpec::Truncation { lambda };
        let u = res.density.potential_at(0.9);
        let slack = u + weight.q(0.9) - res.frostman_constant;
        assert!(slack > 0.1, "slack at 0.9: {slack}");
    }

    #[test]
    fn perturbed_density_fails_the_certificate() {
        let lambda = 2.0;
        let weight = WeightSpec::Truncation { lambda };
        let res = equilibrium_measure(&weight, 1e-12).unwrap();
        // tilt ~5% of the mass outward and re-verify
        let radii = res.density.radii().to_vec();
        let r0 = res.outer_radius;
        let tilted: Vec<f64> = radii
            .iter()
            .zip(res.density.density())
            .map(|(&r, &d)| d * (1.0 + 0.1 * (r / r0 - 0.5)))
            .collect();
        let perturbed = EquilibriumResult {
            density: RadialMeasure::new(radii, tilted).unwrap(),
            ..res.clone()
        };
        let grid = default_verify_grid(&perturbed, &weight);
        let cert = verify_equilibrium(&perturbed, &weight, &grid, 1e-6).unwrap();
        assert!(!cert.passes);
        assert!(
            cert.max_residual_on_support > 1e-3,
            "{}",
            cert.max_residual_on_support
        );
    }

    #[test]
    fn tabulated_weight_reproduces_builtin_solution() {
        let lambda = 2.0;
        let table = uniform_grid(0.0, 0.999, 8193);
        let q: Vec<f64> = table
            .iter()
            .map(|&r| -0.5 * (lambda - 1.0) * (1.0 - r * r).ln())
            .collect();
        let qp: Vec<f64> = table
            .iter()
            .map(|&r| (lambda - 1.0) * r / (1.0 - r * r))
            .collect();
        let weight = WeightSpec::Tabulated {
            radii: table,
            q,
            q_prime: qp,
        };
        let res = equilibrium_measure(&weight, 1e-10).unwrap();
        assert!((res.outer_radius - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-6);
        assert!(
            res.max_residual_on_support <= 1e-4,
            "{}",
            res.max_residual_on_support
        );
    }

    #[test]
    fn non_monotone_weight_is_rejected_with_named_condition() {
        let radii = uniform_grid(0.0, 0.9, 64);
        let q = vec![0.0; 64];
        // rQ' = 5r - 4r^2 rises above 1 and then falls
        let q_prime: Vec<f64> = radii.iter().map(|&r| 5.0 - 4.0 * r).collect();
        let weight = WeightSpec::Tabulated { radii, q, q_prime };
        match equilibrium_measure(&weight, 1e-10) {
            Err(Error::WeightCondition(msg)) => assert!(msg.contains("nondecreasing")),
            other => panic!("expected a named weight condition, got {other:?}"),
        }
    }

    #[test]
    fn annulus_support_for_inward_pushing_field() {
        // Q(r) = -0.1 log r + r^2 pushes inward below sqrt(0.05):
        // rQ'(r) = -0.1 + 2 r^2 is increasing, zero at sqrt(0.05), one at
        // sqrt(0.55).
        let radii = uniform_grid(0.01, 0.95, 4097);
        let q: Vec<f64> = radii.iter().map(|&r| -0.1 * r.ln() + r * r).collect();
        let q_prime: Vec<f64> = radii.iter().map(|&r| -0.1 / r + 2.0 * r).collect();
        let weight = WeightSpec::Tabulated { radii, q, q_prime };
        let res = equilibrium_measure(&weight, 1e-10).unwrap();
        assert!(
            (res.inner_radius - 0.05f64.sqrt()).abs() <= 1e-4,
            "r0 = {}",
            res.inner_radius
        );
        assert!(
            (res.outer_radius - 0.55f64.sqrt()).abs() <= 1e-4,
            "R0 = {}",
            res.outer_radius
        );
        assert!(res.inner_radius < res.outer_radius && res.outer_radius < 1.0);
    }
}
