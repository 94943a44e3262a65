//! Numerical laboratory for the two-dimensional random-field Ising model.
//!
//! * [`field`]: lattice sets and the seeded Gaussian disorder
//! * [`ising`]: Hamiltonian, min-cut ground states, exact Gibbs sums, Γ-function, Monte Carlo
//! * [`animal`]: boundary-normalized greedy lattice animals
//! * [`polygrow`]: randomized triangle-growing polygon construction with geometric validators
//! * [`curve`]: winding numbers and the ν functional on piecewise-linear curves
//! * [`bench`]: experiment configuration, deterministic parallel driver, statistics and fits

pub mod animal;
pub mod bench;
pub mod curve;
pub mod error;
pub mod exec;
pub mod field;
pub mod geom;
pub mod ising;
pub mod maxflow;
pub mod polygrow;
pub mod rng;

pub use error::{Error, Result};
pub use exec::Execution;
