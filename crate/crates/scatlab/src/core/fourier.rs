use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use super::field::ComplexField;
use super::grid::SpatialGrid;

/// Planned discrete Fourier transforms on a spatial grid, treated as periodic
/// with period `n * dx`.
#[derive(Clone)]
pub struct Fourier {
    grid: SpatialGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fourier").field("grid", &self.grid).finish()
    }
}

impl Fourier {
    pub fn new(grid: SpatialGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.n()),
            inverse: planner.plan_fft_inverse(grid.n()),
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// Signed wavenumber of FFT bin `k`.
    #[inline]
    pub fn wavenumber(&self, k: usize) -> f64 {
        let n = self.grid.n();
        let dk = self.grid.fourier_spacing();
        if k <= n / 2 {
            k as f64 * dk
        } else {
            (k as f64 - n as f64) * dk
        }
    }

    /// In place `b_k = sum_j a_j exp(-2 pi i jk/n)`.
    pub fn forward(&self, buf: &mut [C64]) {
        self.forward.process(buf);
    }

    /// In place `a_j = sum_k b_k exp(2 pi i jk/n)` (no normalisation).
    pub fn inverse(&self, buf: &mut [C64]) {
        self.inverse.process(buf);
    }

    /// Apply the Fourier multiplier `symbol(k)` to a field.
    pub fn apply_multiplier(&self, values: &mut [C64], symbol: impl Fn(f64) -> C64) {
        let n = self.grid.n();
        self.forward(values);
        let scale = 1.0 / n as f64;
        for (k, v) in values.iter_mut().enumerate() {
            *v *= symbol(self.wavenumber(k)) * scale;
        }
        self.inverse(values);
    }

    /// Spectral derivative; the Nyquist bin is discarded for even `n`.
    pub fn derivative(&self, field: &ComplexField) -> ComplexField {
        let n = self.grid.n();
        let mut values = field.values.clone();
        let nyquist = n % 2 == 0;
        self.forward(&mut values);
        let scale = 1.0 / n as f64;
        for (k, v) in values.iter_mut().enumerate() {
            if nyquist && k == n / 2 {
                *v = C64::new(0.0, 0.0);
            } else {
                *v *= C64::new(0.0, self.wavenumber(k) * scale);
            }
        }
        self.inverse(&mut values);
        ComplexField { grid: field.grid, values }
    }
}
