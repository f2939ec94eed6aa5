//! Order-by-order ground-state energy of the translation-invariant
//! Pauli-Fierz fiber Hamiltonian at zero total momentum.

pub mod error;
pub mod kernels;
pub mod model;
pub mod quadrature;

pub use error::{Error, Result};
pub mod cli;
pub mod config;
pub mod elements;
pub mod hydrogen;
pub mod oracle;
pub mod report;
pub mod ritz;
