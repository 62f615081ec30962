//! Galilei vector fields `J_0(t) = x - 2it d/dx` and its distorted analogue
//! `J_V(t)`, which acts on spectra as `i d/dxi + 2t xi`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::core::{derivative_x, derivative_xi, l2_norm, linf_norm, ComplexField, Fourier, SpectralField};
use crate::dft::DistortedBasis;
use crate::error::Result;
use crate::prop::evolve_linear;

/// How `d/dx` is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Derivative {
    /// Fourth-order finite differences.
    #[default]
    Stencil,
    /// FFT on the periodic extension of the grid.
    Spectral,
}

impl Derivative {
    pub fn apply(self, f: &ComplexField) -> Result<ComplexField> {
        match self {
            Derivative::Stencil => derivative_x(f),
            Derivative::Spectral => Ok(Fourier::new(f.grid).derivative(f)),
        }
    }
}

pub fn apply_j0(f: &ComplexField, t: f64, rule: Derivative) -> Result<ComplexField> {
    let d = rule.apply(f)?;
    f.zip_map(&d, |x, v, dv| v * x - C64::new(0.0, 2.0 * t) * dv)
}

/// Spectrum of `J_V(t) f` given the spectrum of `f`.
///
/// Evaluated as `e^{it xi^2} i d/dxi (e^{-it xi^2} f~)`, which equals
/// `(i d/dxi + 2t xi) f~` but differentiates the slowly varying profile
/// instead of the chirp.
pub fn jv_spectrum(spec: &SpectralField, t: f64) -> Result<SpectralField> {
    let profile = spec.map(|xi, v| v * C64::from_polar(1.0, -t * xi * xi));
    let d = derivative_xi(&profile)?;
    Ok(d.map(|xi, v| C64::new(0.0, 1.0) * v * C64::from_polar(1.0, t * xi * xi)))
}

pub fn apply_jv(f: &ComplexField, t: f64, basis: &DistortedBasis) -> Result<ComplexField> {
    basis.inverse(&jv_spectrum(&basis.forward(f)?, t)?)
}

/// `J_V(t) = e^{itL} J_V(0) e^{-itL}`, evaluated through three transform pairs.
pub fn apply_jv_conjugated(f: &ComplexField, t: f64, basis: &DistortedBasis) -> Result<ComplexField> {
    let back = evolve_linear(f, -t, basis)?;
    let moved = apply_jv(&back, 0.0, basis)?;
    evolve_linear(&moved, t, basis)
}

/// `‖J_V(t) f‖_2` from the spectrum (Plancherel).
pub fn jv_norm(spec: &SpectralField, t: f64) -> Result<f64> {
    Ok(l2_norm(&jv_spectrum(spec, t)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GalileiReport {
    pub t: f64,
    pub norm_j0: f64,
    pub norm_jv: f64,
    pub norm_f: f64,
    /// `norm_j0 / (norm_jv + norm_f)`.
    pub comparison_ratio: f64,
}

pub fn compare_fields(f: &ComplexField, t: f64, basis: &DistortedBasis) -> Result<GalileiReport> {
    let norm_j0 = l2_norm(&apply_j0(f, t, Derivative::Stencil)?);
    let norm_jv = l2_norm(&apply_jv(f, t, basis)?);
    let norm_f = l2_norm(f);
    let den = norm_jv + norm_f;
    let comparison_ratio = if den > 0.0 { norm_j0 / den } else { 0.0 };
    Ok(GalileiReport { t, norm_j0, norm_jv, norm_f, comparison_ratio })
}

/// Relative residual of the product rule
/// `J_0(|u|^2 u) = 2 (J_0 u) |u|^2 - u^2 conj(J_0 u)`,
/// measured against `‖2 (J_0 u)|u|^2‖ + ‖u^2 conj(J_0 u)‖`.
pub fn nullform_residual(u: &ComplexField, s: f64, rule: Derivative) -> Result<f64> {
    let cubic = u.map(|_, v| v * v.norm_sqr());
    let lhs = apply_j0(&cubic, s, rule)?;
    let ju = apply_j0(u, s, rule)?;
    let first = ju.zip_map(u, |_, j, v| j * v.norm_sqr() * 2.0)?;
    let second = ju.zip_map(u, |_, j, v| v * v * j.conj())?;
    let scale = l2_norm(&first) + l2_norm(&second);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let res = lhs.sub(&first)?.add(&second)?;
    Ok(l2_norm(&res) / scale)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicReport {
    pub s: f64,
    /// `s^{1/2} ‖u‖_inf + s^{-1/10} ‖J_V u‖_2`.
    pub w: f64,
    /// `‖J_V(s)(|u|^2 u)‖_2`.
    pub lhs: f64,
    /// `w^2 s^{-1} (‖J_V u‖_2 + ‖u‖_2)`.
    pub bound: f64,
    pub ratio: f64,
}

pub fn cubic_ratio(u: &ComplexField, s: f64, basis: &DistortedBasis) -> Result<CubicReport> {
    let spec = basis.forward(u)?;
    let jv = jv_norm(&spec, s)?;
    let cubic = u.map(|_, v| v * v.norm_sqr());
    let lhs = jv_norm(&basis.forward(&cubic)?, s)?;
    let w = s.sqrt() * linf_norm(u) + s.powf(-0.1) * jv;
    let bound = w * w / s * (jv + l2_norm(u));
    let ratio = if bound > 0.0 { lhs / bound } else { 0.0 };
    Ok(CubicReport { s, w, lhs, bound, ratio })
}
