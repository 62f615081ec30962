use num_complex::Complex64 as C64;

use super::grid::{FrequencyGrid, SpatialGrid};
use crate::error::{Error, Result};

/// Complex samples on a spatial grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    pub grid: SpatialGrid,
    pub values: Vec<C64>,
}

/// Complex samples on a frequency grid, stored in grid order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub grid: FrequencyGrid,
    pub values: Vec<C64>,
}

fn check_samples(len: usize, expected: usize, values: &[C64]) -> Result<()> {
    if len != expected {
        return Err(Error::GridMismatch(format!(
            "{len} samples for a grid of {expected} points"
        )));
    }
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite sample at index {k}")));
    }
    Ok(())
}

impl ComplexField {
    pub fn new(grid: SpatialGrid, values: Vec<C64>) -> Result<Self> {
        check_samples(values.len(), grid.n(), &values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.n()] }
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> C64) -> Self {
        let values = (0..grid.n()).map(|j| f(grid.x(j))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: SpatialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise map keeping the grid.
    pub fn map(&self, f: impl Fn(f64, C64) -> C64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| f(self.grid.x(j), v))
            .collect();
        Self { grid: self.grid, values }
    }

    pub fn zip_map(&self, other: &ComplexField, f: impl Fn(f64, C64, C64) -> C64) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(j, (&a, &b))| f(self.grid.x(j), a, b))
            .collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|_, v| v * s)
    }

    pub fn add(&self, other: &ComplexField) -> Result<Self> {
        self.zip_map(other, |_, a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexField) -> Result<Self> {
        self.zip_map(other, |_, a, b| a - b)
    }

    pub fn conj(&self) -> Self {
        self.map(|_, v| v.conj())
    }

    /// Reflection `f(x) -> f(-x)` on the symmetric grid.
    pub fn reflect(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { grid: self.grid, values }
    }

    pub fn ensure_same_grid(&self, other: &ComplexField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)))
        }
    }

    pub fn ensure_finite(&self) -> Result<()> {
        check_samples(self.values.len(), self.grid.n(), &self.values)
    }

    /// Four-point Lagrange interpolation at an arbitrary abscissa inside the grid.
    pub fn interpolate(&self, x: f64) -> Result<C64> {
        interpolate_uniform(&self.values, self.grid.x_min(), self.grid.dx(), x)
    }
}

impl SpectralField {
    pub fn new(grid: FrequencyGrid, values: Vec<C64>) -> Result<Self> {
        check_samples(values.len(), grid.len(), &values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64) -> C64) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.value(k))).collect();
        Self { grid, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64, C64) -> C64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| f(self.grid.value(k), v))
            .collect();
        Self { grid: self.grid, values }
    }

    pub fn zip_map(&self, other: &SpectralField, f: impl Fn(f64, C64, C64) -> C64) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(k, (&a, &b))| f(self.grid.value(k), a, b))
            .collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn ensure_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)))
        }
    }
}

/// Four-point Lagrange interpolation of uniformly spaced samples.
pub fn interpolate_uniform(values: &[C64], x0: f64, h: f64, x: f64) -> Result<C64> {
    let n = values.len();
    if n < 4 {
        return Err(Error::Domain("interpolation needs at least four samples".into()));
    }
    let s = (x - x0) / h;
    if s < -1e-9 || s > (n - 1) as f64 + 1e-9 {
        return Err(Error::Domain(format!("x = {x} outside the sampled interval")));
    }
    let base = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = s - base as f64;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..4 {
        let mut l = 1.0;
        for k in 0..4 {
            if k != i {
                l *= (t - k as f64) / (i as f64 - k as f64);
            }
        }
        acc += values[base + i] * l;
    }
    Ok(acc)
}
