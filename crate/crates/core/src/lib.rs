//! Spectral toolkit for truncated Haar unitary random matrices.
//!
//! The crate covers the full pipeline from matrix sampling to potential
//! theory:
//!
//! * [`sampling`] draws complex Ginibre and Haar-distributed unitary
//!   matrices from reproducible per-sample random streams and computes the
//!   spectra of their truncations,
//! * [`spectra`] turns eigenvalue lists into empirical measures and the
//!   statistics (radial CDFs, mixed moments, Kolmogorov distances) used to
//!   compare them against theory,
//! * [`potential`] evaluates logarithmic energies, the large-deviation rate
//!   functional with its constant `B(lambda)`, the finite-size normalizing
//!   constant, and solves/certifies radial weighted equilibrium problems,
//! * [`limit_law`] provides the closed-form limit distribution of the
//!   truncation spectra, its sampler, and the projection-compression
//!   (`QUQ`) mixture with an atom at zero.
//!
//! All randomized operations take explicit RNG streams; batch sampling is
//! deterministic for a fixed `(master_seed, sample_index)` pair regardless
//! of how work is scheduled across threads.

pub mod error;
pub mod limit_law;
pub mod matrix;
pub mod potential;
pub mod quad;
pub mod radial;
pub mod rng;
pub mod sampling;
pub mod spectra;

pub use error::{Error, Result};
pub use limit_law::{BrownMixture, LimitLaw};
pub use matrix::ComplexMatrix;
pub use potential::{
    EquilibriumResult, FrostmanCertificate, RateReport, WeightSpec, constant_b,
    equilibrium_measure, joint_log_density, log_energy_discrete, log_energy_radial,
    log_normalizing_constant, rate_function, signed_energy, verify_equilibrium, weighted_term,
};
pub use radial::RadialMeasure;
pub use rng::sample_stream;
pub use sampling::{EnsembleConfig, SpectralSample, haar_unitary, sample_ginibre, sample_spectra};
pub use spectra::{
    EmpiricalMeasure, Moments, RadialCdfTable, kolmogorov_distance, moment_distance,
};

/// Double-precision complex scalar used throughout the crate.
pub type Complex64 = num_complex::Complex<f64>;
