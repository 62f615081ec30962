use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform grid on the symmetric interval `[-x_max, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    x_max: f64,
    n: usize,
}

impl SpatialGrid {
    pub fn new(x_max: f64, n: usize) -> Result<Self> {
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::Grid(format!("x_max must be positive, got {x_max}")));
        }
        if n < 2 {
            return Err(Error::Grid(format!("need at least two points, got {n}")));
        }
        Ok(Self { x_max, n })
    }

    /// Grid with prescribed spacing and point count, centred on the origin.
    pub fn with_spacing(dx: f64, n: usize) -> Result<Self> {
        Self::new(0.5 * dx * (n as f64 - 1.0), n)
    }

    pub fn x_min(&self) -> f64 {
        -self.x_max
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_max / (self.n as f64 - 1.0)
    }

    /// Sample abscissa; computed so that `x(mirror(j)) == -x(j)` exactly.
    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        let nm1 = self.n as f64 - 1.0;
        self.x_max * (2.0 * j as f64 - nm1) / nm1
    }

    #[inline]
    pub fn mirror(&self, j: usize) -> usize {
        self.n - 1 - j
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Simpson weights for odd `n`, trapezoid weights for even `n`.
    pub fn weights(&self) -> Vec<f64> {
        rule_weights(self.n, self.dx())
    }

    /// Largest central sub-grid with `|x| <= half_width`, and the index of its first point.
    pub fn central_subgrid(&self, half_width: f64) -> Result<(SpatialGrid, usize)> {
        if half_width >= self.x_max {
            return Ok((*self, 0));
        }
        let dx = self.dx();
        let k = ((self.x_max - half_width) / dx - 1e-9).ceil() as usize;
        let len = self.n.saturating_sub(2 * k);
        if len < 5 {
            return Err(Error::Grid(format!(
                "central sub-grid of half width {half_width} has only {len} points"
            )));
        }
        Ok((SpatialGrid::new(self.x(self.n - 1 - k), len)?, k))
    }

    /// Spacing of the discrete Fourier grid dual to this grid (period `n*dx`).
    pub fn fourier_spacing(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.dx())
    }

    pub fn same_as(&self, other: &SpatialGrid) -> bool {
        self.n == other.n && (self.x_max - other.x_max).abs() <= 1e-12 * self.x_max
    }
}

/// Frequency grid `{±xi_k}` with uniform spacing on each half-line.
///
/// Storage order is `-xi_max, ..., -xi_min, xi_min, ..., xi_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    xi_min: f64,
    xi_max: f64,
    m: usize,
}

impl FrequencyGrid {
    pub fn new(xi_min: f64, xi_max: f64, m: usize) -> Result<Self> {
        if !(xi_min > 0.0 && xi_max > xi_min && xi_max.is_finite()) {
            return Err(Error::Grid(format!(
                "need 0 < xi_min < xi_max, got {xi_min}, {xi_max}"
            )));
        }
        if m < 2 {
            return Err(Error::Grid(format!("need m >= 2 points per half-line, got {m}")));
        }
        Ok(Self { xi_min, xi_max, m })
    }

    /// Half-lines drawn from the discrete Fourier grid of `sgrid`, restricted to
    /// `xi_min <= |xi| <= xi_max`.
    pub fn fourier_dual(sgrid: &SpatialGrid, xi_min: f64, xi_max: f64) -> Result<Self> {
        let dk = sgrid.fourier_spacing();
        let k0 = ((xi_min / dk) - 1e-9).ceil().max(1.0) as usize;
        let k1 = ((xi_max / dk) + 1e-9).floor() as usize;
        if k1 <= k0 || k1 >= sgrid.n() / 2 {
            return Err(Error::Grid(format!(
                "no admissible Fourier frequencies in [{xi_min}, {xi_max}] (spacing {dk})"
            )));
        }
        Self::new(k0 as f64 * dk, k1 as f64 * dk, k1 - k0 + 1)
    }

    pub fn xi_min(&self) -> f64 {
        self.xi_min
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    /// Points per half-line.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Total number of samples (both half-lines).
    pub fn len(&self) -> usize {
        2 * self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dxi(&self) -> f64 {
        (self.xi_max - self.xi_min) / (self.m as f64 - 1.0)
    }

    /// `i`-th positive frequency, `0 <= i < m`.
    #[inline]
    pub fn positive(&self, i: usize) -> f64 {
        self.xi_min + (self.xi_max - self.xi_min) * i as f64 / (self.m as f64 - 1.0)
    }

    /// Frequency at storage index `k`.
    #[inline]
    pub fn value(&self, k: usize) -> f64 {
        if k < self.m {
            -self.positive(self.m - 1 - k)
        } else {
            self.positive(k - self.m)
        }
    }

    /// Storage index of `+xi_i`.
    #[inline]
    pub fn index_pos(&self, i: usize) -> usize {
        self.m + i
    }

    /// Storage index of `-xi_i`.
    #[inline]
    pub fn index_neg(&self, i: usize) -> usize {
        self.m - 1 - i
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.value(k)).collect()
    }

    pub fn positive_values(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.positive(i)).collect()
    }

    /// Quadrature weights: each sample stands for a cell of width `dxi`.
    ///
    /// Alternating Simpson weights would alias a ghost copy of every inverse
    /// transform half a period away, so the rule is kept uniform.
    pub fn weights(&self) -> Vec<f64> {
        vec![self.dxi(); self.len()]
    }

    /// If this grid is a restriction of the Fourier grid dual to `sgrid`, the
    /// integer Fourier index of `xi_min`.
    pub fn fourier_offset(&self, sgrid: &SpatialGrid) -> Option<usize> {
        let dk = sgrid.fourier_spacing();
        let k0 = (self.xi_min / dk).round();
        let ok_min = (self.xi_min / dk - k0).abs() < 1e-8;
        let ok_step = (self.dxi() / dk - 1.0).abs() < 1e-8;
        let k1 = k0 as usize + self.m - 1;
        (ok_min && ok_step && k0 >= 1.0 && k1 < sgrid.n() / 2).then_some(k0 as usize)
    }

    pub fn same_as(&self, other: &FrequencyGrid) -> bool {
        self.m == other.m
            && (self.xi_min - other.xi_min).abs() <= 1e-12 * self.xi_max
            && (self.xi_max - other.xi_max).abs() <= 1e-12 * self.xi_max
    }
}

/// Composite Simpson weights (odd `n`) or trapezoid weights (even `n`).
pub fn rule_weights(n: usize, h: f64) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    if n % 2 == 1 {
        let mut w: Vec<f64> = (0..n)
            .map(|j| if j % 2 == 1 { 4.0 } else { 2.0 })
            .collect();
        w[0] = 1.0;
        w[n - 1] = 1.0;
        w.iter_mut().for_each(|v| *v *= h / 3.0);
        w
    } else {
        let mut w = vec![h; n];
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
        w
    }
}

/// `count` logarithmically spaced points from `a` to `b` inclusive.
pub fn log_space(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..count)
        .map(|i| {
            if i == count - 1 {
                b
            } else {
                (la + (lb - la) * i as f64 / (count as f64 - 1.0)).exp()
            }
        })
        .collect()
}
