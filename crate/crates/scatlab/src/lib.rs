//! Numerical scattering theory and long-time cubic NLS dynamics for the
//! Schrodinger operator `L = -d^2/dx^2 + 2/(1 + x^2)`.

pub mod cli;
pub mod config;
pub mod core;
pub mod dft;
pub mod error;
pub mod galilei;
pub mod jost;
pub mod nls;
pub mod ode;
pub mod prop;
pub mod scatter;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
