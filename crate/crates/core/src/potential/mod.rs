//! Logarithmic potential theory: energies, the large-deviation rate
//! functional, finite-size normalizing constants, and radial weighted
//! equilibrium problems.

mod constants;
mod energy;
mod equilibrium;
mod rate;

pub(crate) use constants::validate_lambda;
pub use constants::{constant_b, joint_log_density, log_normalizing_constant};
pub use energy::{
    DiscMeasure, log_energy_discrete, log_energy_radial, signed_energy, weighted_term,
};
pub use equilibrium::{
    EquilibriumResult, FrostmanCertificate, WeightSpec, equilibrium_measure, verify_equilibrium,
};
pub use rate::{EDGE_CUTOFF, RateReport, rate_function};
