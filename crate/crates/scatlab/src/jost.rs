//! Jost solutions, the interior fundamental system near zero energy, connection
//! coefficients and the scattering coefficients `T`, `R`.
//!
//! Wronskians use `W[f, g] = f g' - f' g` throughout.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::core::{ComplexField, SpatialGrid};
use crate::error::{Error, Result};
use crate::ode::Dopri5;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Which operator is being studied: the repulsive potential or the free oracle `V = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Potential,
    Free,
}

impl Mode {
    #[inline]
    pub fn potential(self, x: f64) -> f64 {
        match self {
            Mode::Potential => potential(x),
            Mode::Free => 0.0,
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "potential" => Ok(Mode::Potential),
            "free" => Ok(Mode::Free),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// `V(x) = 2 / (1 + x^2)`.
#[inline]
pub fn potential(x: f64) -> f64 {
    2.0 / (1.0 + x * x)
}

/// Outgoing solution `e^{iu}(1 + i/u)` of `-g'' + 2 g / u^2 = g`.
pub fn h_plus(u: f64) -> Result<C64> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("h_plus needs u > 0, got {u}")));
    }
    Ok(h_plus_unchecked(u))
}

#[inline]
fn h_plus_unchecked(u: f64) -> C64 {
    C64::from_polar(1.0, u) * C64::new(1.0, 1.0 / u)
}

/// `d/du h_plus(u) = e^{iu}(i - 1/u - i/u^2)`.
#[inline]
pub fn h_plus_prime(u: f64) -> C64 {
    C64::from_polar(1.0, u) * C64::new(-1.0 / u, 1.0 - 1.0 / (u * u))
}

/// Free-type profile `e^{iu}(1 + i/u)` continued to negative `u`.
#[inline]
pub fn outgoing_profile(u: f64) -> C64 {
    h_plus_unchecked(u)
}

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Eight-point Gauss-Legendre rule on `[a, b]`.
fn gauss8(a: f64, b: f64, mut f: impl FnMut(f64) -> (C64, C64)) -> (C64, C64) {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for (&t, &w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
        for s in [-t, t] {
            let (p, q) = f(mid + half * s);
            acc.0 += p * w;
            acc.1 += q * w;
        }
    }
    (acc.0 * half, acc.1 * half)
}

/// First Volterra iterate `rho_10(u, xi)` and its derivative in `u`.
///
/// The correction enters the outgoing Jost solution as
/// `f_+(x, xi) ~ h_plus(x xi) (1 + xi^2 rho_10(x xi, xi))`.
pub fn rho10_with_derivative(u: f64, xi: f64) -> Result<(C64, C64)> {
    if !(xi > 0.0 && u >= xi) {
        return Err(Error::Domain(format!("rho10 needs u >= xi > 0, got u = {u}, xi = {xi}")));
    }
    let ui = C64::new(u, 1.0);
    let integrand = |v: f64| {
        let e = C64::from_polar(1.0, -2.0 * (u - v));
        let k0 = (1.0 + e) * (v - u) - I * (1.0 - e) * (1.0 + u * v);
        let dk0 = -2.0 * I * e * (v - u) - (1.0 + e) + 2.0 * e * (1.0 + u * v) - I * v * (1.0 - e);
        let common = C64::new(v, 1.0) / (v.powi(4) * (v * v + xi * xi));
        let value = k0 / ui * common;
        let deriv = (dk0 / ui - k0 / (ui * ui)) * common;
        (value, deriv)
    };
    let mut total = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let mut add = |t: (C64, C64)| {
        total.0 += t.0;
        total.1 += t.1;
    };
    let knee = u.max(1.0);
    let mut a = u;
    while a < knee {
        let b = (a * 1.25).min(knee);
        add(gauss8(a, b, integrand));
        a = b;
    }
    let panel = 0.25;
    let reach = knee + 200.0;
    let panels = ((reach - knee) / panel).round() as usize;
    for p in 0..panels {
        let a = knee + p as f64 * panel;
        add(gauss8(a, a + panel, integrand));
    }
    // Beyond `reach` only the non-oscillatory part is kept; the oscillatory
    // remainder is below reach^-4.
    let smooth = |v: f64| {
        let k0 = C64::new(v - u, -(1.0 + u * v));
        let dk0 = C64::new(-1.0, -v);
        let common = C64::new(v, 1.0) / (v.powi(4) * (v * v + xi * xi));
        (k0 / ui * common, (dk0 / ui - k0 / (ui * ui)) * common)
    };
    for (a, b) in [(0.0, 0.5), (0.5, 1.0)] {
        add(gauss8(a, b, |s| {
            if s == 0.0 {
                return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            }
            let v = reach / s;
            let jac = reach / (s * s);
            let (p, q) = smooth(v);
            (p * jac, q * jac)
        }));
    }
    Ok(total)
}

pub fn rho10(u: f64, xi: f64) -> Result<C64> {
    rho10_with_derivative(u, xi).map(|r| r.0)
}

/// Settings for the Jost-solution integrator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JostOptions {
    /// Relative and absolute tolerance of the Runge-Kutta integrator.
    pub tol: f64,
    /// The Volterra correction is applied at the matching point when `x0 * xi` is below this.
    pub rho_threshold: f64,
    pub mode: Mode,
}

impl Default for JostOptions {
    fn default() -> Self {
        Self { tol: 1e-10, rho_threshold: 50.0, mode: Mode::Potential }
    }
}

/// Smallest admissible `x0 * xi` for matching to the outgoing profile.
pub const MIN_MATCHING_PHASE: f64 = 10.0;

/// Matching abscissa used for a requested `x0`: pushed outwards to
/// `MIN_MATCHING_PHASE / xi` when `x0 * xi` would be too small.
pub fn matching_abscissa(xi: f64, x0: f64) -> f64 {
    x0.max(MIN_MATCHING_PHASE / xi)
}

/// Asymptotic data `(f, f')` of `f_+` at the matching point `x0`.
pub fn matching_data(xi: f64, x0: f64, opts: &JostOptions) -> Result<(C64, C64)> {
    if opts.mode == Mode::Free {
        let e = C64::from_polar(1.0, x0 * xi);
        return Ok((e, I * xi * e));
    }
    let u = x0 * xi;
    if u < MIN_MATCHING_PHASE * (1.0 - 1e-12) {
        return Err(Error::MatchingPoint(u));
    }
    let (h, hp) = (h_plus_unchecked(u), h_plus_prime(u));
    if u < opts.rho_threshold {
        let (r, dr) = rho10_with_derivative(u, xi)?;
        let corr = 1.0 + xi * xi * r;
        Ok((h * corr, xi * (hp * corr + h * xi * xi * dr)))
    } else {
        Ok((h, xi * hp))
    }
}

/// Integrate `f'' = (V - xi^2) f` from `x0` with data `y0`, reporting `(f, f')` at
/// the monotone abscissae `targets`.
pub fn shoot(
    xi: f64,
    mode: Mode,
    tol: f64,
    x0: f64,
    y0: [C64; 2],
    targets: &[f64],
) -> Result<Vec<[C64; 2]>> {
    let k2 = xi * xi;
    Dopri5::new(tol)
        .solve(move |x, y: &[C64; 2]| [y[1], y[0] * (mode.potential(x) - k2)], x0, y0, targets)
        .map(|(v, _)| v)
}

/// A sampled solution together with its derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSolution {
    pub f: ComplexField,
    pub fp: ComplexField,
}

impl SampledSolution {
    pub fn grid(&self) -> SpatialGrid {
        self.f.grid
    }

    /// `W[self, other]` at grid index `j`.
    pub fn wronskian_at(&self, other: &SampledSolution, j: usize) -> C64 {
        self.f.values[j] * other.fp.values[j] - self.fp.values[j] * other.f.values[j]
    }

    /// `W[self, other]` at an arbitrary abscissa (four-point interpolation).
    pub fn wronskian(&self, other: &SampledSolution, x: f64) -> Result<C64> {
        self.f.ensure_same_grid(&other.f)?;
        let (f, fp) = (self.f.interpolate(x)?, self.fp.interpolate(x)?);
        let (g, gp) = (other.f.interpolate(x)?, other.fp.interpolate(x)?);
        Ok(f * gp - fp * g)
    }
}

/// Jost solution `f_+(., xi)` (or its mirror `f_-`) sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct JostSolution {
    pub xi: f64,
    pub sol: SampledSolution,
    /// Matching abscissa of the asymptotic data.
    pub x0: f64,
    /// `(f(0), f'(0))` captured during integration.
    pub origin: (C64, C64),
    pub mode: Mode,
    pub minus: bool,
}

impl JostSolution {
    pub fn f(&self) -> &ComplexField {
        &self.sol.f
    }

    pub fn fprime(&self) -> &ComplexField {
        &self.sol.fp
    }

    /// Same-energy solution with `xi -> -xi`, which is the complex conjugate.
    pub fn conjugate(&self) -> JostSolution {
        JostSolution {
            xi: -self.xi,
            sol: SampledSolution { f: self.sol.f.conj(), fp: self.sol.fp.conj() },
            x0: self.x0,
            origin: (self.origin.0.conj(), self.origin.1.conj()),
            mode: self.mode,
            minus: self.minus,
        }
    }
}

/// `f_+(x, xi)` on `grid`, matched at `x0 = max(x_max, 10 / xi)` and integrated leftwards.
pub fn integrate_jost_plus(xi: f64, grid: &SpatialGrid, opts: &JostOptions) -> Result<JostSolution> {
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("xi must be positive, got {xi}")));
    }
    let x0 = matching_abscissa(xi, grid.x_max());
    if opts.mode == Mode::Free {
        let f = ComplexField::from_fn(*grid, |x| C64::from_polar(1.0, x * xi));
        let fp = f.scale(I * xi);
        return Ok(JostSolution {
            xi,
            sol: SampledSolution { f, fp },
            x0,
            origin: (C64::new(1.0, 0.0), I * xi),
            mode: Mode::Free,
            minus: false,
        });
    }
    let y0 = matching_data(xi, x0, opts)?;
    let n = grid.n();
    // Descending abscissae with the origin spliced in.
    let mut targets = Vec::with_capacity(n + 1);
    let mut origin_slot = None;
    for j in (0..n).rev() {
        let x = grid.x(j);
        if origin_slot.is_none() && x <= 0.0 {
            origin_slot = Some(targets.len());
            targets.push(0.0);
        }
        targets.push(x);
    }
    let states = shoot(xi, opts.mode, opts.tol, x0, [y0.0, y0.1], &targets)?;
    let slot = origin_slot.expect("symmetric grid contains x <= 0");
    let origin = (states[slot][0], states[slot][1]);
    let mut f = vec![C64::new(0.0, 0.0); n];
    let mut fp = vec![C64::new(0.0, 0.0); n];
    let mut it = states.iter().enumerate().filter(|(k, _)| *k != slot).map(|(_, s)| s);
    for j in (0..n).rev() {
        let s = it.next().expect("one state per grid point");
        f[j] = s[0];
        fp[j] = s[1];
    }
    Ok(JostSolution {
        xi,
        sol: SampledSolution {
            f: ComplexField::new(*grid, f)?,
            fp: ComplexField::new(*grid, fp)?,
        },
        x0,
        origin,
        mode: opts.mode,
        minus: false,
    })
}

/// `f_-(x, xi) = f_+(-x, xi)`, so `f_-' (x) = -f_+'(-x)`.
pub fn jost_minus(sol: &JostSolution) -> Result<JostSolution> {
    if sol.minus {
        return Err(Error::Domain("input is already a left Jost solution".into()));
    }
    let f = sol.sol.f.reflect();
    let fp = sol.sol.fp.reflect().scale(C64::new(-1.0, 0.0));
    Ok(JostSolution {
        xi: sol.xi,
        sol: SampledSolution { f, fp },
        x0: -sol.x0,
        origin: (sol.origin.0, -sol.origin.1),
        mode: sol.mode,
        minus: true,
    })
}

/// `W[f, g](x)` for two sampled solutions of the same energy.
pub fn wronskian(f: &JostSolution, g: &JostSolution, x: f64) -> Result<C64> {
    if (f.xi.abs() - g.xi.abs()).abs() > 1e-14 * f.xi.abs() {
        return Err(Error::GridMismatch(format!("energies differ: {} vs {}", f.xi, g.xi)));
    }
    f.sol.wronskian(&g.sol, x)
}

/// Zero-energy solutions `f_1 = 1 + x^2` and
/// `f_2 = (pi/2 - arctan x)(1 + x^2) - x`, with `W[f_1, f_2] = -2`.
pub fn zero_energy_pair(grid: &SpatialGrid) -> (SampledSolution, SampledSolution) {
    let re = |f: fn(f64) -> f64| ComplexField::from_real_fn(*grid, f);
    let f1 = SampledSolution { f: re(|x| 1.0 + x * x), fp: re(|x| 2.0 * x) };
    let f2 = SampledSolution {
        f: re(|x| (0.5 * PI - x.atan()) * (1.0 + x * x) - x),
        fp: re(|x| 2.0 * x * (0.5 * PI - x.atan()) - 2.0),
    };
    (f1, f2)
}

/// `tau_0(x) = (3x^2 + 8 + 4 log(1 + x^2) - 8/(1 + x^2)) / 30`, the first-order
/// energy correction of `phi_1 = (1 + x^2)(1 + xi^2 tau)`.
pub fn tau0(x: f64) -> f64 {
    let s = 1.0 + x * x;
    if x.abs() < 1e-3 {
        // Series avoids cancellation near the origin.
        let x2 = x * x;
        return x2 / 2.0 - x2 * x2 / 3.0 + x2 * x2 * x2 * (14.0 / 45.0);
    }
    (3.0 * x * x + 8.0 + 4.0 * s.ln() - 8.0 / s) / 30.0
}

/// Regular solution `phi_1` with `phi_1(0) = 1, phi_1'(0) = 0`, together with
/// `J(x) = int_0^x phi_1^{-2}`, at ascending abscissae `targets >= 0`.
fn phi1_with_integral(xi: f64, tol: f64, targets: &[f64]) -> Result<Vec<[C64; 3]>> {
    let k2 = xi * xi;
    Dopri5::new(tol)
        .solve(
            move |x, y: &[C64; 3]| [y[1], y[0] * (potential(x) - k2), 1.0 / (y[0] * y[0])],
            0.0,
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            targets,
        )
        .map(|(v, _)| v)
}

/// Interior fundamental system near zero energy.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiSystem {
    pub xi: f64,
    pub delta: f64,
    /// `phi_1` on the central sub-grid `|x| <= delta / xi`.
    pub phi1: SampledSolution,
    /// `phi_2 = phi_1 int_x^{delta/xi} phi_1^{-2}`, which vanishes at `delta / xi`.
    pub phi2: SampledSolution,
    pub phi2_origin: C64,
}

pub fn phi_system(xi: f64, delta: f64, grid: &SpatialGrid, tol: f64) -> Result<PhiSystem> {
    if !(xi > 0.0 && xi <= 1.0 && delta > 0.0) {
        return Err(Error::Domain(format!("phi_system needs 0 < xi <= 1, delta > 0 (xi = {xi})")));
    }
    let x_end = delta / xi;
    if x_end > grid.x_max() {
        return Err(Error::Domain(format!(
            "delta/xi = {x_end} exceeds the grid half width {}",
            grid.x_max()
        )));
    }
    let (sub, _) = grid.central_subgrid(x_end)?;
    let half: Vec<usize> = (0..sub.n()).filter(|&j| sub.x(j) >= 0.0).collect();
    let mut targets: Vec<f64> = half.iter().map(|&j| sub.x(j)).collect();
    targets.push(x_end);
    let states = phi1_with_integral(xi, tol, &targets)?;
    let j_end = states.last().expect("non-empty")[2];
    for (&x, s) in targets.iter().zip(&states) {
        let ratio = s[0].re / (1.0 + x * x);
        if !(0.5..=1.5).contains(&ratio) {
            return Err(Error::Accuracy(format!(
                "phi_1 left [1/2, 3/2](1 + x^2) at x = {x} (ratio {ratio}); reduce delta"
            )));
        }
    }
    let n = sub.n();
    let zero = C64::new(0.0, 0.0);
    let (mut p1, mut p1p, mut p2, mut p2p) =
        (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    for (&j, s) in half.iter().zip(&states) {
        let m = sub.mirror(j);
        let (f, fp, jj) = (s[0], s[1], s[2]);
        // phi_1 is even; J is odd.
        for (idx, sign) in [(j, 1.0), (m, -1.0)] {
            let rest = j_end - jj * sign;
            p1[idx] = f;
            p1p[idx] = fp * sign;
            p2[idx] = f * rest;
            p2p[idx] = fp * sign * rest - 1.0 / f;
        }
    }
    Ok(PhiSystem {
        xi,
        delta,
        phi1: SampledSolution { f: ComplexField::new(sub, p1)?, fp: ComplexField::new(sub, p1p)? },
        phi2: SampledSolution { f: ComplexField::new(sub, p2)?, fp: ComplexField::new(sub, p2p)? },
        phi2_origin: j_end,
    })
}

/// Connection coefficients of `f_+` in the interior basis `phi_1, phi_2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionData {
    pub xi: f64,
    pub c1: C64,
    pub c2: C64,
    pub tilde_c1: C64,
    pub tilde_c2: C64,
    /// Abscissa where the Wronskians were evaluated.
    pub x_eval: f64,
}

/// `c1 = W[f_+, phi_2]`, `c2 = -W[f_+, phi_1]` at `x = min(10, delta / (2 xi))`,
/// `tilde_c1 = -c1 phi_2(0) + 2 c2`, `tilde_c2 = c2`.
pub fn connection_coeffs(xi: f64, delta: f64, x0: f64, opts: &JostOptions) -> Result<ConnectionData> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::Domain(format!("connection coefficients need 0 < xi <= 1, got {xi}")));
    }
    let x_end = delta / xi;
    let x_eval = (0.5 * x_end).min(10.0);
    let phi = phi1_with_integral(xi, opts.tol, &[x_eval, x_end])?;
    let (p1, p1p, jx) = (phi[0][0], phi[0][1], phi[0][2]);
    let j_end = phi[1][2];
    let p2 = p1 * (j_end - jx);
    let p2p = p1p * (j_end - jx) - 1.0 / p1;
    let x0 = matching_abscissa(xi, x0);
    let y0 = matching_data(xi, x0, opts)?;
    let f = shoot(xi, opts.mode, opts.tol, x0, [y0.0, y0.1], &[x_eval])?[0];
    let c1 = f[0] * p2p - f[1] * p2;
    let c2 = -(f[0] * p1p - f[1] * p1);
    Ok(ConnectionData { xi, c1, c2, tilde_c1: -c1 * j_end + 2.0 * c2, tilde_c2: c2, x_eval })
}

/// Scattering data at a positive energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringCoeffs {
    pub xi: f64,
    pub t: C64,
    pub r: C64,
    /// `W[f_+, f_-]`.
    pub w: C64,
    /// `T / xi^3`.
    pub t0_estimate: C64,
}

impl ScatteringCoeffs {
    /// From `f_+(0)` and `f_+'(0)`: `W[f_+, f_-] = -2 f_+(0) f_+'(0)`,
    /// `T = -2 i xi / W`, `R = -(conj(f')/f' + conj(f)/f) / 2`.
    pub fn from_origin(xi: f64, f0: C64, fp0: C64) -> Result<Self> {
        let w = -2.0 * f0 * fp0;
        if !(w.norm() > 1e-250 && w.is_finite()) {
            return Err(Error::DegenerateWronskian(xi));
        }
        let t = -2.0 * I * xi / w;
        let r = -0.5 * (fp0.conj() / fp0 + f0.conj() / f0);
        Ok(Self { xi, t, r, w, t0_estimate: t / (xi * xi * xi) })
    }

    pub fn from_jost(sol: &JostSolution) -> Result<Self> {
        Self::from_origin(sol.xi, sol.origin.0, sol.origin.1)
    }

    /// Coefficients at `-xi`, the complex conjugates.
    pub fn at_negative(&self) -> Self {
        Self {
            xi: -self.xi,
            t: self.t.conj(),
            r: self.r.conj(),
            w: self.w.conj(),
            t0_estimate: -self.t0_estimate.conj(),
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        (self.t.norm_sqr() + self.r.norm_sqr() - 1.0).abs()
    }
}

/// `T(xi)`, `R(xi)` by shooting `f_+` from `x0` to the origin.
pub fn scattering_coeffs(xi: f64, x0: f64, opts: &JostOptions) -> Result<ScatteringCoeffs> {
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("xi must be positive, got {xi}")));
    }
    if opts.mode == Mode::Free {
        return ScatteringCoeffs::from_origin(xi, C64::new(1.0, 0.0), I * xi);
    }
    let x0 = matching_abscissa(xi, x0);
    let y0 = matching_data(xi, x0, opts)?;
    let s = shoot(xi, opts.mode, opts.tol, x0, [y0.0, y0.1], &[0.0])?[0];
    ScatteringCoeffs::from_origin(xi, s[0], s[1])
}
