//! Wave-packet profiles `alpha(v, t)`, the asymptotic ODE they obey along rays
//! `x = vt`, and extraction of the modified-scattering data `(u_inf, Phi_inf)`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core::field::interpolate_uniform;
use crate::core::{l2_norm, ComplexField};
use crate::dft::DistortedBasis;
use crate::error::{Error, Result};
use crate::galilei::jv_norm;
use crate::prop::log_log_fit;

pub const BUMP_RADIUS: f64 = 5.0;

/// Even bump `chi(y) = c exp(-1/(1 - (y/5)^2))` with unit integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub support_radius: f64,
    pub normalization: f64,
}

impl BumpSpec {
    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        let s = y / self.support_radius;
        if s.abs() >= 1.0 {
            0.0
        } else {
            self.normalization * (-1.0 / (1.0 - s * s)).exp()
        }
    }
}

pub fn bump_chi() -> BumpSpec {
    // The integrand is flat to all orders at the ends, so the trapezoid rule
    // converges faster than any power.
    let n = 4000;
    let h = 2.0 * BUMP_RADIUS / n as f64;
    let raw = BumpSpec { support_radius: BUMP_RADIUS, normalization: 1.0 };
    let integral: f64 = (1..n).map(|j| raw.eval(-BUMP_RADIUS + j as f64 * h)).sum::<f64>() * h;
    BumpSpec { support_radius: BUMP_RADIUS, normalization: 1.0 / integral }
}

/// Uniform velocity grid on `[-v_max, v_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VelocityGrid {
    pub v_max: f64,
    pub count: usize,
}

impl VelocityGrid {
    pub fn new(v_max: f64, count: usize) -> Result<Self> {
        if !(v_max > 0.0 && v_max.is_finite()) || count < 4 {
            return Err(Error::Grid(format!("bad velocity grid: v_max = {v_max}, count = {count}")));
        }
        Ok(Self { v_max, count })
    }

    pub fn dv(&self) -> f64 {
        2.0 * self.v_max / (self.count - 1) as f64
    }

    pub fn v(&self, i: usize) -> f64 {
        -self.v_max + i as f64 * self.dv()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.v(i)).collect()
    }
}

/// `v` lies in the outer region `|v| >= 10 t^{-1/2}`.
pub fn in_outer_region(v: f64, t: f64) -> bool {
    v.abs() >= 10.0 / t.sqrt()
}

/// `alpha(v, t) = int u conj(Psi_v)` with `Psi_v = e^{-ix^2/(4t)} chi((x - vt)/sqrt(t))`.
/// Velocities whose packet leaves the grid give `None`.
pub fn profile_alpha(u: &ComplexField, t: f64, vgrid: &VelocityGrid, chi: &BumpSpec) -> Vec<Option<C64>> {
    let g = u.grid;
    let dx = g.dx();
    let root = t.sqrt();
    let reach = chi.support_radius * root;
    (0..vgrid.count)
        .into_par_iter()
        .map(|i| {
            let c = vgrid.v(i) * t;
            if c - reach < g.x_min() || c + reach > g.x_max() {
                return None;
            }
            let lo = ((c - reach - g.x_min()) / dx).ceil() as usize;
            let hi = (((c + reach - g.x_min()) / dx).floor() as usize).min(g.n() - 1);
            let mut acc = C64::new(0.0, 0.0);
            for j in lo..=hi {
                let x = g.x(j);
                let w = chi.eval((x - c) / root);
                acc += u.values[j] * C64::from_polar(w, x * x / (4.0 * t));
            }
            Some(acc * dx)
        })
        .collect()
}

/// `alpha(v, t_n)` on a fixed velocity grid at increasing times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSeries {
    pub vgrid: VelocityGrid,
    pub times: Vec<f64>,
    /// `alpha[n][i] = alpha(v_i, t_n)`.
    pub alpha: Vec<Vec<Option<C64>>>,
    pub outer_mask: Vec<Vec<bool>>,
}

impl ProfileSeries {
    pub fn new(vgrid: VelocityGrid) -> Self {
        Self { vgrid, times: Vec::new(), alpha: Vec::new(), outer_mask: Vec::new() }
    }

    pub fn push(&mut self, u: &ComplexField, t: f64, chi: &BumpSpec) -> Result<()> {
        if self.times.last().is_some_and(|&last| t <= last) {
            return Err(Error::Domain("profile times must increase".into()));
        }
        let row = profile_alpha(u, t, &self.vgrid, chi);
        self.outer_mask.push((0..self.vgrid.count).map(|i| in_outer_region(self.vgrid.v(i), t)).collect());
        self.alpha.push(row);
        self.times.push(t);
        Ok(())
    }

    pub fn time_index(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| (s - t).abs() <= 1e-9 * t.max(1.0))
    }

    /// `sup_v |alpha(v, t_n)|`.
    pub fn sup(&self, n: usize) -> f64 {
        self.alpha[n].iter().flatten().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// `‖alpha(., t_n)‖_{L^2_v}` over the available velocities.
    pub fn l2(&self, n: usize) -> f64 {
        (self.alpha[n].iter().flatten().map(|a| a.norm_sqr()).sum::<f64>() * self.vgrid.dv()).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileComparison {
    pub t: f64,
    pub linf_defect: f64,
    pub l2_defect: f64,
    /// `linf_defect / (t^{-3/4} ‖<J_V> u‖_2)`.
    pub linf_ratio: f64,
    /// `l2_defect / (t^{-1} ‖<J_V> u‖_2)`.
    pub l2_ratio: f64,
}

/// Defect of `u(vt, t) ~ t^{-1/2} e^{-itv^2/4} alpha(v, t)` in `L^inf_v` and `L^2_v`.
pub fn profile_compare(
    u: &ComplexField,
    t: f64,
    vgrid: &VelocityGrid,
    alpha: &[Option<C64>],
    basis: &DistortedBasis,
) -> Result<ProfileComparison> {
    let mut linf: f64 = 0.0;
    let mut l2 = 0.0;
    for (i, a) in alpha.iter().enumerate() {
        let Some(a) = a else { continue };
        let v = vgrid.v(i);
        let Ok(uv) = u.interpolate(v * t) else { continue };
        let model = a * C64::from_polar(t.powf(-0.5), -t * v * v / 4.0);
        let d = (uv - model).norm();
        linf = linf.max(d);
        l2 += d * d * vgrid.dv();
    }
    let l2 = l2.sqrt();
    let jv = jv_norm(&basis.forward(u)?, t)?;
    let bracket = (l2_norm(u).powi(2) + jv * jv).sqrt();
    let ratio = |d: f64, scale: f64| if scale > 0.0 { d / scale } else { 0.0 };
    Ok(ProfileComparison {
        t,
        linf_defect: linf,
        l2_defect: l2,
        linf_ratio: ratio(linf, t.powf(-0.75) * bracket),
        l2_ratio: ratio(l2, bracket / t),
    })
}

/// Residual `R = d/dt alpha + i mu t^{-1} |alpha|^2 alpha` of the asymptotic ODE.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeResidual {
    pub times: Vec<f64>,
    /// `residual[n][i]`, present where `v_i` lies in the outer region at `times[n]`.
    pub residual: Vec<Vec<Option<C64>>>,
    /// `‖R(., t)‖_{L^inf(Omega_t)}`.
    pub sup: Vec<f64>,
}

impl OdeResidual {
    /// Log-log slope of the sup norm over `[t_lo, t_hi]`.
    pub fn decay_exponent(&self, t_lo: f64, t_hi: f64) -> Result<f64> {
        let (t, r): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&self.sup)
            .filter(|(t, r)| **t >= t_lo && **t <= t_hi && **r > 0.0)
            .map(|(a, b)| (*a, *b))
            .unzip();
        log_log_fit(&t, &r).map(|(s, _)| s)
    }
}

/// Centred three-point differences in `t` on the (possibly non-uniform) record times.
pub fn ode_residual(series: &ProfileSeries, mu: i32) -> Result<OdeResidual> {
    let nt = series.times.len();
    if nt < 3 {
        return Err(Error::Insufficient(format!("need >= 3 record times, got {nt}")));
    }
    let mu = mu as f64;
    let mut out = OdeResidual { times: Vec::new(), residual: Vec::new(), sup: Vec::new() };
    for n in 1..nt - 1 {
        let (t0, t1, t2) = (series.times[n - 1], series.times[n], series.times[n + 1]);
        let (h1, h2) = (t1 - t0, t2 - t1);
        let (c0, c1, c2) = (-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2)));
        let row: Vec<Option<C64>> = (0..series.vgrid.count)
            .map(|i| {
                if !series.outer_mask[n][i] {
                    return None;
                }
                let (a0, a1, a2) = (series.alpha[n - 1][i]?, series.alpha[n][i]?, series.alpha[n + 1][i]?);
                let dt = a0 * c0 + a1 * c1 + a2 * c2;
                Some(dt + C64::new(0.0, mu / t1) * a1.norm_sqr() * a1)
            })
            .collect();
        out.sup.push(row.iter().flatten().map(|r| r.norm()).fold(0.0, f64::max));
        out.residual.push(row);
        out.times.push(t1);
    }
    Ok(out)
}

/// `beta(v, t_n) = e^{i mu int_1^t s^{-1} |alpha|^2 ds} alpha(v, t_n)` and the phase
/// integral itself, using the trapezoid rule in `log s` over all record times.
/// Entries are `None` when `alpha` is missing at any earlier time.
pub fn modulated_profiles(series: &ProfileSeries, mu: i32) -> (Vec<Vec<Option<C64>>>, Vec<Vec<Option<f64>>>) {
    let nv = series.vgrid.count;
    let mut beta = Vec::with_capacity(series.times.len());
    let mut phase = Vec::with_capacity(series.times.len());
    let mut acc: Vec<Option<f64>> = vec![Some(0.0); nv];
    for n in 0..series.times.len() {
        if n > 0 {
            let dl = (series.times[n] / series.times[n - 1]).ln();
            for i in 0..nv {
                acc[i] = match (acc[i], series.alpha[n - 1][i], series.alpha[n][i]) {
                    (Some(s), Some(a), Some(b)) => Some(s + 0.5 * dl * (a.norm_sqr() + b.norm_sqr())),
                    _ => None,
                };
            }
        }
        let row: Vec<Option<C64>> = (0..nv)
            .map(|i| {
                let a = series.alpha[n][i]?;
                Some(a * C64::from_polar(1.0, mu as f64 * acc[i]?))
            })
            .collect();
        beta.push(row);
        phase.push(acc.clone());
    }
    (beta, phase)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticData {
    pub vgrid: VelocityGrid,
    pub t_b: f64,
    /// `beta(v, t_b)`; `None` where `v` is outside `Omega_{t_b}` or data is missing.
    pub u_inf: Vec<Option<C64>>,
    /// `Phi(t_b) = int_1^{t_b} s^{-1} |alpha|^2 ds - log(t_b) |alpha(t_b)|^2`.
    pub phi_inf: Vec<Option<f64>>,
    /// `max_v |beta(v, t_b) - beta(v, t_b/2)|` over `Omega_{t_b/2}`.
    pub cauchy_defect: f64,
}

/// Extract `(u_inf, Phi_inf)` at the last record time `t_b`; the series must
/// also contain `t_b / 2` and start at or before `t_b / 4`.
pub fn extract_asymptotics(series: &ProfileSeries, mu: i32) -> Result<AsymptoticData> {
    let nb = series.times.len().checked_sub(1).ok_or_else(|| Error::Insufficient("empty series".into()))?;
    let t_b = series.times[nb];
    if series.times[0] > t_b / 4.0 {
        return Err(Error::Insufficient(format!("series must start at or before {}", t_b / 4.0)));
    }
    let nh = series
        .time_index(t_b / 2.0)
        .ok_or_else(|| Error::Insufficient(format!("t_b/2 = {} is not a record time", t_b / 2.0)))?;
    let (beta, phase) = modulated_profiles(series, mu);
    let nv = series.vgrid.count;
    let mut u_inf = vec![None; nv];
    let mut phi_inf = vec![None; nv];
    for i in 0..nv {
        if !series.outer_mask[nb][i] {
            continue;
        }
        if let (Some(b), Some(p), Some(a)) = (beta[nb][i], phase[nb][i], series.alpha[nb][i]) {
            u_inf[i] = Some(b);
            phi_inf[i] = Some(p - t_b.ln() * a.norm_sqr());
        }
    }
    let cauchy_defect = cauchy_defect(series, &beta, nh, nb, nh);
    Ok(AsymptoticData { vgrid: series.vgrid, t_b, u_inf, phi_inf, cauchy_defect })
}

fn cauchy_defect(series: &ProfileSeries, beta: &[Vec<Option<C64>>], n1: usize, n2: usize, mask: usize) -> f64 {
    (0..series.vgrid.count)
        .filter(|&i| series.outer_mask[mask][i])
        .filter_map(|i| Some((beta[n2][i]? - beta[n1][i]?).norm()))
        .fold(0.0, f64::max)
}

/// `max_v |beta(v, t) - beta(v, t/2)|` for each record time `t` whose half is
/// also recorded, over the fixed velocity set `Omega_{t_min}`.
pub fn cauchy_defects(series: &ProfileSeries, mu: i32, t_min: f64) -> Result<Vec<(f64, f64)>> {
    let mask = series
        .time_index(t_min)
        .ok_or_else(|| Error::Insufficient(format!("t_min = {t_min} is not a record time")))?;
    let (beta, _) = modulated_profiles(series, mu);
    let mut out = Vec::new();
    for (n, &t) in series.times.iter().enumerate() {
        if t < 2.0 * t_min {
            continue;
        }
        if let Some(h) = series.time_index(t / 2.0) {
            out.push((t, cauchy_defect(series, &beta, h, n, mask)));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderNorms {
    pub t: f64,
    pub linf: f64,
    pub l2: f64,
}

/// Clamped four-point interpolation on the velocity grid; missing samples count as 0.
fn interpolate_velocity(values: &[C64], vgrid: &VelocityGrid, v: f64) -> C64 {
    let v = v.clamp(-vgrid.v_max, vgrid.v_max);
    interpolate_uniform(values, -vgrid.v_max, vgrid.dv(), v).unwrap_or_default()
}

/// `R[u] = u - t^{-1/2} e^{-i x^2/(4t) - i mu |u_inf|^2 log t - i mu Phi_inf} u_inf(x/t)`.
pub fn remainder(u: &ComplexField, t: f64, asym: &AsymptoticData, mu: i32) -> Result<RemainderNorms> {
    let mu = mu as f64;
    let uv: Vec<C64> = asym.u_inf.iter().map(|a| a.unwrap_or_default()).collect();
    let pv: Vec<C64> = asym.phi_inf.iter().map(|p| C64::new(p.unwrap_or(0.0), 0.0)).collect();
    let scale = t.powf(-0.5);
    let r = u.map(|x, val| {
        let v = x / t;
        let a = interpolate_velocity(&uv, &asym.vgrid, v);
        let phi = interpolate_velocity(&pv, &asym.vgrid, v).re;
        let phase = -x * x / (4.0 * t) - mu * (a.norm_sqr() * t.ln() + phi);
        val - a * C64::from_polar(scale, phase)
    });
    r.ensure_finite()?;
    Ok(RemainderNorms { t, linf: crate::core::linf_norm(&r), l2: l2_norm(&r) })
}
