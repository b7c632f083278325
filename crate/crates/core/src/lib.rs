pub mod actions;
pub mod charts;
pub mod error;
pub mod exterior;
pub mod expr;
pub mod hamiltonian;
pub mod quadrature;
pub mod reduction;
pub mod scenarios;

pub use error::{Error, Result};
