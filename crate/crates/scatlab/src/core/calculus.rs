//! Quadrature, finite differences and norms on sampled fields.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::field::{ComplexField, SpectralField};
use crate::error::{Error, Result};

/// Anything carrying samples with an associated quadrature rule.
pub trait Sampled {
    fn samples(&self) -> &[C64];
    fn quadrature_weights(&self) -> Vec<f64>;
    /// Coordinate of sample `k` (position or frequency).
    fn coordinate(&self, k: usize) -> f64;
}

impl Sampled for ComplexField {
    fn samples(&self) -> &[C64] {
        &self.values
    }
    fn quadrature_weights(&self) -> Vec<f64> {
        self.grid.weights()
    }
    fn coordinate(&self, k: usize) -> f64 {
        self.grid.x(k)
    }
}

impl Sampled for SpectralField {
    fn samples(&self) -> &[C64] {
        &self.values
    }
    fn quadrature_weights(&self) -> Vec<f64> {
        self.grid.weights()
    }
    fn coordinate(&self, k: usize) -> f64 {
        self.grid.value(k)
    }
}

/// Composite Simpson (odd count) or trapezoid (even count) integral of the samples.
pub fn quadrature<F: Sampled>(field: &F) -> Result<C64> {
    let v = field.samples();
    if v.is_empty() {
        return Err(Error::EmptyField);
    }
    let w = field.quadrature_weights();
    Ok(v.iter().zip(&w).map(|(a, &b)| a * b).sum())
}

/// Weighted integral of a real integrand built from the samples.
pub fn integrate_real<F: Sampled>(field: &F, f: impl Fn(f64, C64) -> f64) -> Result<f64> {
    let v = field.samples();
    if v.is_empty() {
        return Err(Error::EmptyField);
    }
    let w = field.quadrature_weights();
    Ok(v
        .iter()
        .zip(&w)
        .enumerate()
        .map(|(k, (&a, &b))| b * f(field.coordinate(k), a))
        .sum())
}

/// Fourth-order first derivative of uniformly spaced samples: centred in the
/// interior, one-sided in the two outermost points at each end.
pub fn differentiate_uniform(v: &[C64], h: f64) -> Result<Vec<C64>> {
    let n = v.len();
    if n < 5 {
        return Err(Error::Grid(format!("fourth-order stencil needs 5 points, got {n}")));
    }
    let c = 1.0 / (12.0 * h);
    let mut d = vec![C64::new(0.0, 0.0); n];
    for j in 2..n - 2 {
        d[j] = (v[j - 2] - v[j - 1] * 8.0 + v[j + 1] * 8.0 - v[j + 2]) * c;
    }
    d[0] = (v[0] * -25.0 + v[1] * 48.0 - v[2] * 36.0 + v[3] * 16.0 - v[4] * 3.0) * c;
    d[1] = (v[0] * -3.0 - v[1] * 10.0 + v[2] * 18.0 - v[3] * 6.0 + v[4]) * c;
    d[n - 1] = -(v[n - 1] * -25.0 + v[n - 2] * 48.0 - v[n - 3] * 36.0 + v[n - 4] * 16.0
        - v[n - 5] * 3.0)
        * c;
    d[n - 2] = -(v[n - 1] * -3.0 - v[n - 2] * 10.0 + v[n - 3] * 18.0 - v[n - 4] * 6.0
        + v[n - 5])
        * c;
    Ok(d)
}

/// `d/dx` with the fourth-order stencil.
pub fn derivative_x(field: &ComplexField) -> Result<ComplexField> {
    let d = differentiate_uniform(&field.values, field.grid.dx())?;
    Ok(ComplexField { grid: field.grid, values: d })
}

/// `d/dxi` on each half-line separately; the excluded band around zero is never
/// differenced across.
pub fn derivative_xi(spec: &SpectralField) -> Result<SpectralField> {
    let m = spec.grid.m();
    let h = spec.grid.dxi();
    let mut values = differentiate_uniform(&spec.values[..m], h)?;
    values.extend(differentiate_uniform(&spec.values[m..], h)?);
    Ok(SpectralField { grid: spec.grid, values })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l2: f64,
    pub linf: f64,
    /// `integral of (1 + x^2) |f|`.
    pub weighted_l1: f64,
}

pub fn l2_norm<F: Sampled>(field: &F) -> f64 {
    integrate_real(field, |_, v| v.norm_sqr()).map(f64::sqrt).unwrap_or(0.0)
}

pub fn linf_norm<F: Sampled>(field: &F) -> f64 {
    field.samples().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn norms<F: Sampled>(field: &F) -> Norms {
    Norms {
        l2: l2_norm(field),
        linf: linf_norm(field),
        weighted_l1: integrate_real(field, |x, v| (1.0 + x * x) * v.norm()).unwrap_or(0.0),
    }
}

/// Inner product `integral f * conj(g)`.
pub fn inner(f: &ComplexField, g: &ComplexField) -> Result<C64> {
    f.ensure_same_grid(g)?;
    let w = f.grid.weights();
    Ok(f.values
        .iter()
        .zip(&g.values)
        .zip(&w)
        .map(|((a, b), &c)| a * b.conj() * c)
        .sum())
}

/// Inner product on a frequency grid.
pub fn inner_spectral(f: &SpectralField, g: &SpectralField) -> Result<C64> {
    f.ensure_same_grid(g)?;
    let w = f.grid.weights();
    Ok(f.values
        .iter()
        .zip(&g.values)
        .zip(&w)
        .map(|((a, b), &c)| a * b.conj() * c)
        .sum())
}

/// Relative L2 distance `|f - g| / |g|`.
pub fn relative_l2(f: &ComplexField, g: &ComplexField) -> Result<f64> {
    let d = f.sub(g)?;
    let den = l2_norm(g);
    if den == 0.0 {
        return Ok(l2_norm(&d));
    }
    Ok(l2_norm(&d) / den)
}
