//! Empirical spectral measures and comparison statistics.

use crate::Complex64;
use crate::error::{Error, Result};

/// Maximum total moment order accepted by the moment functionals.
pub const MAX_MOMENT_ORDER: u32 = 64;

/// Moduli are pulled down to this value when eigensolver roundoff lands on
/// or above the unit circle, keeping `log(1 - |z|^2)` finite downstream.
pub const EDGE_CLAMP: f64 = 1.0 - 1e-12;

/// Sources of mixed moments `∫ z^{k1} conj(z)^{k2} dμ`.
pub trait Moments {
    fn mixed_moment(&self, k1: u32, k2: u32) -> Complex64;
}

/// Atomic probability measure on the closed unit disc.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Vec<(Complex64, f64)>,
}

impl EmpiricalMeasure {
    /// The empirical eigenvalue measure: one atom of weight `1/n` per
    /// eigenvalue. Moduli above `1 - 1e-12` (roundoff on contractions) are
    /// rescaled onto that circle; moduli above `1 + 1e-8` are rejected.
    pub fn from_eigenvalues(eigenvalues: &[Complex64]) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidInput("empty eigenvalue list".into()));
        }
        let w = 1.0 / eigenvalues.len() as f64;
        let mut atoms = Vec::with_capacity(eigenvalues.len());
        for &z in eigenvalues {
            let r = z.norm();
            if !r.is_finite() || r > 1.0 + crate::sampling::CONTRACTION_TOL {
                return Err(Error::InvalidInput(format!(
                    "eigenvalue {z} lies outside the contraction tolerance"
                )));
            }
            let clamped = if r > EDGE_CLAMP {
                z * (EDGE_CLAMP / r)
            } else {
                z
            };
            atoms.push((clamped, w));
        }
        Ok(Self { atoms })
    }

    /// Builds a measure from explicit atoms. Weights must be positive and
    /// sum to one; locations must lie in the closed unit disc. No clamping
    /// is applied.
    pub fn from_atoms(atoms: Vec<(Complex64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput(
                "measure needs at least one atom".into(),
            ));
        }
        let mut total = 0.0;
        for &(z, w) in &atoms {
            if w <= 0.0 || !w.is_finite() {
                return Err(Error::InvalidMeasure(
                    "atom weights must be positive".into(),
                ));
            }
            if z.norm() > 1.0 {
                return Err(Error::InvalidMeasure(format!(
                    "atom {z} lies outside the unit disc"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!(
                "atom weights sum to {total}, not 1"
            )));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(Complex64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Weight of atoms with modulus at most `t`.
    pub fn radial_mass_below(&self, t: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|(z, _)| z.norm() <= t)
            .map(|(_, w)| w)
            .sum()
    }

    /// Empirical radial CDF sampled on `grid`; the grid must be increasing
    /// and end at 1 so the table closes at full mass.
    pub fn radial_cdf(&self, grid: &[f64]) -> Result<RadialCdfTable> {
        let values = grid
            .iter()
            .map(|&t| self.radial_mass_below(t))
            .collect::<Vec<_>>();
        RadialCdfTable::new(grid.to_vec(), values)
    }

    /// Drops atoms with modulus above `rmax` and renormalizes; returns the
    /// restricted measure and the mass removed.
    pub fn restricted(&self, rmax: f64) -> Result<(Self, f64)> {
        let kept: Vec<(Complex64, f64)> = self
            .atoms
            .iter()
            .copied()
            .filter(|(z, _)| z.norm() <= rmax)
            .collect();
        let kept_mass: f64 = kept.iter().map(|(_, w)| w).sum();
        if kept.is_empty() || kept_mass <= 0.0 {
            return Err(Error::SingularMeasure(format!(
                "no mass remains inside radius {rmax}"
            )));
        }
        let atoms = kept.into_iter().map(|(z, w)| (z, w / kept_mass)).collect();
        Ok((Self { atoms }, 1.0 - kept_mass))
    }
}

impl Moments for EmpiricalMeasure {
    fn mixed_moment(&self, k1: u32, k2: u32) -> Complex64 {
        assert!(
            k1 + k2 <= MAX_MOMENT_ORDER,
            "moment order {} too large",
            k1 + k2
        );
        self.atoms
            .iter()
            .map(|&(z, w)| z.powu(k1) * z.conj().powu(k2) * w)
            .sum()
    }
}

/// Radial CDF tabulated on an increasing grid ending at 1.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialCdfTable {
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl RadialCdfTable {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.len() < 2 {
            return Err(Error::InvalidInput(
                "CDF table needs matching grids of length >= 2".into(),
            ));
        }
        if !radii.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidMeasure(
                "CDF radii must be strictly increasing".into(),
            ));
        }
        if radii[0] < 0.0 || (radii[radii.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(
                "CDF grid must lie in [0, 1] and end at 1".into(),
            ));
        }
        if !values.windows(2).all(|w| w[1] >= w[0] - 1e-12) {
            return Err(Error::InvalidMeasure(
                "CDF values must be nondecreasing".into(),
            ));
        }
        if (values[values.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(
                "CDF must reach 1 at the last radius".into(),
            ));
        }
        Ok(Self { radii, values })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Largest absolute difference between two CDF tables on a shared grid.
pub fn kolmogorov_distance(a: &RadialCdfTable, b: &RadialCdfTable) -> Result<f64> {
    if a.radii != b.radii {
        return Err(Error::GridMismatch(
            "CDF tables live on different grids".into(),
        ));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Max difference of mixed moments over all orders `k1 + k2 <= max_order`.
pub fn moment_distance<A: Moments, B: Moments>(a: &A, b: &B, max_order: u32) -> f64 {
    assert!((1..=MAX_MOMENT_ORDER).contains(&max_order));
    let mut worst = 0.0f64;
    for k1 in 0..=max_order {
        for k2 in 0..=(max_order - k1) {
            let d = (a.mixed_moment(k1, k2) - b.mixed_moment(k1, k2)).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Uniform grid of `points` nodes from 0 to 1 inclusive.
pub fn unit_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    let h = 1.0 / (points - 1) as f64;
    let mut g: Vec<f64> = (0..points).map(|i| i as f64 * h).collect();
    g[points - 1] = 1.0;
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;
    use crate::rng::sample_stream;
    use crate::sampling::haar_unitary;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_atom_at_zero() {
        let mu = EmpiricalMeasure::from_eigenvalues(&[c(0.0, 0.0)]).unwrap();
        assert_eq!(mu.atoms(), &[(c(0.0, 0.0), 1.0)]);
        let grid = unit_grid(8);
        let cdf = mu.radial_cdf(&grid).unwrap();
        assert!(cdf.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn two_symmetric_atoms() {
        let mu = EmpiricalMeasure::from_eigenvalues(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(mu.len(), 2);
        for &(_, w) in mu.atoms() {
            assert_eq!(w, 0.5);
        }
    }

    #[test]
    fn haar_spectrum_measure_sits_on_the_circle() {
        let u = haar_unitary(4, &mut sample_stream(1, 0)).unwrap();
        let mu = EmpiricalMeasure::from_eigenvalues(&u.eigenvalues().unwrap()).unwrap();
        assert_eq!(mu.len(), 4);
        for &(z, w) in mu.atoms() {
            assert_eq!(w, 0.25);
            assert!((z.norm() - 1.0).abs() <= 1e-9);
            assert!(z.norm() <= 1.0);
        }
    }

    #[test]
    fn empty_list_is_rejected() {
        assert!(EmpiricalMeasure::from_eigenvalues(&[]).is_err());
    }

    #[test]
    fn moduli_above_tolerance_are_rejected() {
        assert!(EmpiricalMeasure::from_eigenvalues(&[c(1.1, 0.0)]).is_err());
        // within tolerance: clamped to just below the circle
        let mu = EmpiricalMeasure::from_eigenvalues(&[c(1.0 + 5e-9, 0.0)]).unwrap();
        assert!(mu.atoms()[0].0.norm() <= EDGE_CLAMP);
    }

    #[test]
    fn counting_cdf() {
        let mu = EmpiricalMeasure::from_eigenvalues(&[c(0.2, 0.0), c(0.0, 0.8)]).unwrap();
        assert_eq!(mu.radial_mass_below(0.5), 0.5);
    }

    #[test]
    fn normalization_moment_is_exactly_one() {
        let mu =
            EmpiricalMeasure::from_eigenvalues(&[c(0.3, 0.1), c(-0.2, 0.5), c(0.0, 0.0)]).unwrap();
        assert_eq!(mu.mixed_moment(0, 0), c(1.0, 0.0));
    }

    #[test]
    fn first_moment_matches_trace() {
        let u = haar_unitary(6, &mut sample_stream(2, 0)).unwrap();
        let t = u.truncate(4).unwrap();
        let mu = EmpiricalMeasure::from_eigenvalues(&t.eigenvalues().unwrap()).unwrap();
        let diff = (mu.mixed_moment(1, 0) - t.trace() / c(4.0, 0.0)).norm();
        assert!(diff <= 1e-8, "diff {diff:.3e}");
    }

    #[test]
    fn moment_trace_consistency_for_powers() {
        let u = haar_unitary(9, &mut sample_stream(4, 2)).unwrap();
        let t = u.truncate(5).unwrap();
        let mu = EmpiricalMeasure::from_eigenvalues(&t.eigenvalues().unwrap()).unwrap();
        let mut power = ComplexMatrix::identity(5);
        for k in 1..=6u32 {
            power = power.mul(&t).unwrap();
            let diff = (mu.mixed_moment(k, 0) - power.trace() / c(5.0, 0.0)).norm();
            assert!(diff <= 1e-6, "k = {k}: diff {diff:.3e}");
        }
    }

    #[test]
    fn moment_distance_examples() {
        let mu = EmpiricalMeasure::from_eigenvalues(&[c(0.1, 0.2), c(-0.4, 0.0)]).unwrap();
        assert_eq!(moment_distance(&mu, &mu, 6), 0.0);
        let d0 = EmpiricalMeasure::from_eigenvalues(&[c(0.0, 0.0)]).unwrap();
        let dh = EmpiricalMeasure::from_eigenvalues(&[c(0.5, 0.0)]).unwrap();
        assert!((moment_distance(&d0, &dh, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn kolmogorov_examples() {
        let grid = unit_grid(11);
        let a = EmpiricalMeasure::from_eigenvalues(&[c(0.2, 0.0)]).unwrap();
        let b = EmpiricalMeasure::from_eigenvalues(&[c(0.8, 0.0)]).unwrap();
        let ta = a.radial_cdf(&grid).unwrap();
        let tb = b.radial_cdf(&grid).unwrap();
        assert_eq!(kolmogorov_distance(&ta, &ta).unwrap(), 0.0);
        assert_eq!(kolmogorov_distance(&ta, &tb).unwrap(), 1.0);
        let other = EmpiricalMeasure::from_eigenvalues(&[c(0.2, 0.0)])
            .unwrap()
            .radial_cdf(&unit_grid(12))
            .unwrap();
        assert!(matches!(
            kolmogorov_distance(&ta, &other),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn restriction_reports_cut_mass() {
        let mu = EmpiricalMeasure::from_eigenvalues(&[c(0.1, 0.0), c(0.9, 0.0)]).unwrap();
        let (inner, cut) = mu.restricted(0.5).unwrap();
        assert_eq!(inner.len(), 1);
        assert!((cut - 0.5).abs() < 1e-15);
        assert!(mu.restricted(0.05).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_measure() -> impl Strategy<Value = EmpiricalMeasure> {
            proptest::collection::vec((-0.7f64..0.7, -0.7f64..0.7), 1..12).prop_map(|pts| {
                let eigs: Vec<Complex64> = pts.into_iter().map(|(x, y)| c(x, y)).collect();
                EmpiricalMeasure::from_eigenvalues(&eigs).unwrap()
            })
        }

        proptest! {
            #[test]
            fn conjugation_symmetry(mu in arb_measure(), k1 in 0u32..5, k2 in 0u32..5) {
                let a = mu.mixed_moment(k1, k2);
                let b = mu.mixed_moment(k2, k1).conj();
                prop_assert!((a - b).norm() <= 1e-12);
            }

            #[test]
            fn moment_distance_is_a_pseudometric(
                a in arb_measure(),
                b in arb_measure(),
                c_ in arb_measure(),
            ) {
                let dab = moment_distance(&a, &b, 4);
                let dba = moment_distance(&b, &a, 4);
                prop_assert!((dab - dba).abs() <= 1e-14);
                let dac = moment_distance(&a, &c_, 4);
                let dcb = moment_distance(&c_, &b, 4);
                prop_assert!(dab <= dac + dcb + 1e-12);
            }
        }
    }
}
