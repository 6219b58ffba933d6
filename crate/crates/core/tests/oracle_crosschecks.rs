//! Independent numerical oracles for the quadrature-based routines: brute
//! Monte Carlo for the radial energy reduction, closed forms for CDF
//! values, and pooled-spectra statistics at desk scale.

use haartrunc::spectra::{EmpiricalMeasure, unit_grid};
use haartrunc::{
    Complex64, EnsembleConfig, LimitLaw, Moments, log_energy_radial, moment_distance, quad,
    sample_spectra, sample_stream,
};

#[test]
fn radial_energy_matches_two_dimensional_monte_carlo() {
    let law = LimitLaw::new(2.0).unwrap();
    let mu = law.discretized(1024).unwrap();
    let quadrature = log_energy_radial(&mu);

    // brute-force \iint log|z - w| by sampling independent point pairs
    let mut rng = sample_stream(0xbeef, 0);
    let pairs = 1_000_000usize;
    let zs = law.sample(pairs, &mut rng);
    let ws = law.sample(pairs, &mut rng);
    let mc = zs
        .iter()
        .zip(&ws)
        .map(|(z, w)| (z - w).norm().ln())
        .sum::<f64>()
        / pairs as f64;

    assert!(
        (quadrature - mc).abs() <= 5e-3,
        "quadrature {quadrature:.6} vs Monte Carlo {mc:.6}"
    );
    // the closed-form value at lambda = 2 is exactly -1/2
    assert!(
        (quadrature + 0.5).abs() <= 1e-5,
        "quadrature {quadrature:.8}"
    );
}

#[test]
fn pooled_spectra_stay_close_to_the_limit_law_in_moments() {
    let config = EnsembleConfig::new(200, 100, 100, 0xfeed_0001).unwrap();
    let samples = sample_spectra(&config).unwrap();
    let pooled: Vec<Complex64> = samples.into_iter().flat_map(|s| s.eigenvalues).collect();
    let mu = EmpiricalMeasure::from_eigenvalues(&pooled).unwrap();
    let law = LimitLaw::new(2.0).unwrap();
    let mu0 = law.discretized(1024).unwrap();

    let md = moment_distance(&mu, &mu0, 4);
    assert!(md <= 0.05, "moment distance {md:.4}");

    // away from the support edge the empirical radial CDF matches the
    // closed form (lambda-1) t^2 / (1-t^2)
    let grid = unit_grid(512);
    let cdf = mu.radial_cdf(&grid).unwrap();
    let at_half = cdf.values()[grid.iter().position(|&t| t >= 0.5).unwrap()];
    assert!((at_half - 1.0 / 3.0).abs() <= 0.02, "F(0.5) = {at_half:.4}");
}

#[test]
fn rotation_invariance_of_pooled_spectra() {
    let config = EnsembleConfig::new(60, 30, 200, 0xfeed_0002).unwrap();
    let samples = sample_spectra(&config).unwrap();
    let pooled: Vec<Complex64> = samples.into_iter().flat_map(|s| s.eigenvalues).collect();
    let mu = EmpiricalMeasure::from_eigenvalues(&pooled).unwrap();
    for k in 1..=4u32 {
        let m = mu.mixed_moment(k, 0).norm();
        assert!(m <= 0.02, "order {k}: |moment| = {m:.4}");
    }
}

#[test]
fn truncation_density_normalizes_on_the_disc() {
    // n = 1, m = 3: the density (2/pi)(1 - |z|^2) integrates to one; in
    // polar coordinates that is \int_0^1 (2/pi)(1 - r^2) 2 pi r dr.
    let mass = quad::adaptive_simpson(
        &|r: f64| (2.0 / std::f64::consts::PI) * (1.0 - r * r) * 2.0 * std::f64::consts::PI * r,
        0.0,
        1.0,
        1e-12,
    );
    assert!((mass - 1.0).abs() <= 1e-10, "mass {mass}");
}
