//! Random-field Ising model: Hamiltonian, exact ground states, exact small-volume
//! Gibbs measures, free-energy differences and Monte-Carlo magnetization.

mod gibbs;
mod ground;
mod hamiltonian;
mod mc;

pub use gibbs::{delta_free_energy, gamma, gamma_increment, gibbs_exact, Beta, GibbsSummary, ENUMERATION_CAP};
pub use ground::ground_state;
pub use hamiltonian::{hamiltonian, Bc, Region, SpinConfig};
pub use mc::{
    correlation_length, magnetization_mc, magnetization_samples, mean_and_stderr, origin_magnetizations, sample_seed, summarize_samples, CorrelationLength, MagSample,
    MagnetizationEstimate,
};

