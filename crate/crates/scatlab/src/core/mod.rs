//! Grids, sampled fields, quadrature, differentiation and norms.

pub mod calculus;
pub mod field;
pub mod fourier;
pub mod grid;

pub use calculus::{
    derivative_x, derivative_xi, inner, inner_spectral, integrate_real, l2_norm, linf_norm,
    norms, quadrature, relative_l2, Norms, Sampled,
};
pub use field::{ComplexField, SpectralField};
pub use fourier::Fourier;
pub use grid::{log_space, FrequencyGrid, SpatialGrid};
