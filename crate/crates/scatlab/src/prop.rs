//! Linear Schrodinger evolution `e^{itL}` in the distorted basis and decay fits.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::core::{linf_norm, ComplexField, SpectralField};
use crate::dft::DistortedBasis;
use crate::error::{Error, Result};

/// Multiply a spectrum by `e^{i t xi^2}`.
pub fn propagate_spectrum(spec: &SpectralField, t: f64) -> SpectralField {
    spec.map(|xi, v| v * C64::from_polar(1.0, t * xi * xi))
}

/// `e^{itL} f = inverse(e^{i t xi^2} forward(f))`.
pub fn evolve_linear(f: &ComplexField, t: f64, basis: &DistortedBasis) -> Result<ComplexField> {
    let spec = basis.forward(f)?;
    basis.inverse(&propagate_spectrum(&spec, t))
}

/// Largest time for which every retained frequency stays inside the grid:
/// `2 t max|xi| < x_max`.
pub fn truncation_horizon(basis: &DistortedBasis) -> f64 {
    basis.spatial_grid().x_max() / (2.0 * basis.frequency_grid().xi_max())
}

fn check_window(times: &[f64], basis: &DistortedBasis) -> Result<()> {
    let horizon = truncation_horizon(basis);
    if let Some(&t) = times.iter().find(|&&t| t >= horizon) {
        return Err(Error::Truncation { t, horizon });
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("fit times must be strictly increasing".into()));
    }
    if times.len() < 2 {
        return Err(Error::Insufficient("a decay fit needs at least two times".into()));
    }
    Ok(())
}

/// Least-squares power law `norm ~ C t^slope`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
}

impl DecayFit {
    pub fn new(times: Vec<f64>, norms: Vec<f64>) -> Result<Self> {
        let (slope, intercept) = log_log_fit(&times, &norms)?;
        Ok(Self { times, norms, slope, intercept })
    }

    /// Refit on the sub-window `[t_lo, t_hi]`.
    pub fn restricted(&self, t_lo: f64, t_hi: f64) -> Result<DecayFit> {
        let (t, n): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&self.norms)
            .filter(|(t, _)| **t >= t_lo && **t <= t_hi)
            .map(|(a, b)| (*a, *b))
            .unzip();
        DecayFit::new(t, n)
    }
}

/// Slope and intercept of `log y` against `log x`.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Insufficient(format!("fit needs >= 2 paired samples, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("log-log fit needs positive samples".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fit of `‖e^{itL} f‖_inf` against `t`.
pub fn dispersive_decay_fit(f: &ComplexField, basis: &DistortedBasis, times: &[f64]) -> Result<DecayFit> {
    check_window(times, basis)?;
    let spec = basis.forward(f)?;
    let norms = times
        .iter()
        .map(|&t| basis.inverse(&propagate_spectrum(&spec, t)).map(|u| linf_norm(&u)))
        .collect::<Result<Vec<_>>>()?;
    DecayFit::new(times.to_vec(), norms)
}

/// `sup_{|x| <= t^gamma} |e^{itL} f|` on grid points.
pub fn local_sup(u: &ComplexField, t: f64, gamma: f64) -> f64 {
    let r = t.powf(gamma);
    u.values
        .iter()
        .enumerate()
        .filter(|(j, _)| u.grid.x(*j).abs() <= r)
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max)
}

/// Fit of the local sup over `|x| <= t^gamma` against `t`.
pub fn local_decay_fit(
    f: &ComplexField,
    basis: &DistortedBasis,
    times: &[f64],
    gamma: f64,
) -> Result<DecayFit> {
    if !(0.5..1.0).contains(&gamma) {
        return Err(Error::Domain(format!("gamma must lie in [1/2, 1), got {gamma}")));
    }
    check_window(times, basis)?;
    let spec = basis.forward(f)?;
    let norms = times
        .iter()
        .map(|&t| basis.inverse(&propagate_spectrum(&spec, t)).map(|u| local_sup(&u, t, gamma)))
        .collect::<Result<Vec<_>>>()?;
    DecayFit::new(times.to_vec(), norms)
}

/// Global and local sup norms sampled together (one inverse transform per time).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySamples {
    pub times: Vec<f64>,
    pub global_sup: Vec<f64>,
    pub local_sup: Vec<f64>,
    pub gamma: f64,
}

impl DecaySamples {
    pub fn global_fit(&self) -> Result<DecayFit> {
        DecayFit::new(self.times.clone(), self.global_sup.clone())
    }

    pub fn local_fit(&self) -> Result<DecayFit> {
        DecayFit::new(self.times.clone(), self.local_sup.clone())
    }
}

pub fn sample_decay(
    f: &ComplexField,
    basis: &DistortedBasis,
    times: &[f64],
    gamma: f64,
) -> Result<DecaySamples> {
    check_window(times, basis)?;
    let spec = basis.forward(f)?;
    let mut global_sup = Vec::with_capacity(times.len());
    let mut local = Vec::with_capacity(times.len());
    for &t in times {
        let u = basis.inverse(&propagate_spectrum(&spec, t))?;
        global_sup.push(linf_norm(&u));
        local.push(local_sup(&u, t, gamma));
    }
    Ok(DecaySamples { times: times.to_vec(), global_sup, local_sup: local, gamma })
}

/// Named test data: `gaussian` `e^{-x^2}`, `modulated` `e^{2ix - x^2}`, `odd` `x e^{-x^2}`.
pub fn preset(name: &str, grid: crate::core::SpatialGrid) -> Result<ComplexField> {
    match name {
        "gaussian" => Ok(ComplexField::from_real_fn(grid, |x| (-x * x).exp())),
        "modulated" => Ok(ComplexField::from_fn(grid, |x| C64::new(-x * x, 2.0 * x).exp())),
        "odd" => Ok(ComplexField::from_real_fn(grid, |x| x * (-x * x).exp())),
        other => Err(Error::Config(format!("unknown data preset `{other}`"))),
    }
}

/// Closed-form free evolution `e^{-it d^2/dx^2}` of `e^{-a x^2 + ikx}`.
pub fn free_gaussian(a: f64, k: f64, x: f64, t: f64) -> C64 {
    let quad = C64::new(1.0 / (4.0 * a), -t);
    let lin = C64::new(k / (2.0 * a), x);
    let exponent = lin * lin / (quad * 4.0) - k * k / (4.0 * a);
    (std::f64::consts::PI / quad).sqrt() * exponent.exp() / (4.0 * std::f64::consts::PI * a).sqrt()
}
