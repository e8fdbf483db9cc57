//! Evans-function stability analysis for solitary waves of multisymplectic
//! Hamiltonian PDEs `M Z_t + K Z_x = grad S(Z)`.

pub mod asymptotics;
pub mod error;
pub mod evans;
pub mod exec;
pub mod finite_re;
pub mod integrator;
pub mod invariants;
pub mod linalg;
pub mod model;
pub mod problem;

pub use error::{Error, Result};
