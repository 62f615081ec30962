//! Distorted Fourier transform in the generalized eigenfunctions of `L`.
//!
//! `e(x, xi) = T(xi) f_+(x, xi) / sqrt(2 pi)` for `xi > 0` and
//! `e(x, xi) = e(-x, -xi)` for `xi < 0`. The forward transform is
//! `f~(xi) = int f conj(e)`, the inverse `f(x) = int f~ e`.
//!
//! The basis is a dense matrix on a central core `|x| <= core_half_width`.
//! Outside the core, `f_+` is replaced by its closed-form outgoing profile
//! `e^{ix xi}(1 + i/(x xi))` and the tail sums are evaluated with FFTs; this
//! requires the frequency grid to be a restriction of the discrete Fourier grid.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::core::{
    derivative_x, derivative_xi, l2_norm, ComplexField, Fourier, FrequencyGrid, SpatialGrid,
    SpectralField,
};
use crate::error::{Error, Result};
use crate::jost::{integrate_jost_plus, JostOptions, Mode, ScatteringCoeffs};

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn inv_sqrt_2pi() -> f64 {
    1.0 / (2.0 * PI).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisOptions {
    pub jost: JostOptions,
    /// Half width of the dense core; `INFINITY` keeps the whole grid dense.
    pub core_half_width: f64,
}

impl Default for BasisOptions {
    fn default() -> Self {
        Self { jost: JostOptions::default(), core_half_width: f64::INFINITY }
    }
}

impl BasisOptions {
    pub fn free() -> Self {
        Self { jost: JostOptions { mode: Mode::Free, ..JostOptions::default() }, ..Self::default() }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.jost.mode = mode;
        self
    }

    pub fn with_core(mut self, half_width: f64) -> Self {
        self.core_half_width = half_width;
        self
    }
}

struct Tails {
    fourier: Fourier,
    /// Fourier index of `xi_min`.
    k0: usize,
}

/// Sampled generalized eigenfunctions plus quadrature weights.
pub struct DistortedBasis {
    sgrid: SpatialGrid,
    fgrid: FrequencyGrid,
    mode: Mode,
    core: SpatialGrid,
    core_offset: usize,
    /// Column `i` holds `e(x, xi_i)` on the core for the `i`-th positive frequency.
    cols: Vec<C64>,
    coeffs: Vec<ScatteringCoeffs>,
    wx: Vec<f64>,
    wxi: Vec<f64>,
    tails: Option<Tails>,
}

impl std::fmt::Debug for DistortedBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DistortedBasis")
            .field("sgrid", &self.sgrid)
            .field("fgrid", &self.fgrid)
            .field("mode", &self.mode)
            .field("core", &self.core)
            .field("tails", &self.tails.is_some())
            .finish()
    }
}

impl DistortedBasis {
    /// Build the basis; columns are computed in parallel.
    pub fn build(sgrid: SpatialGrid, fgrid: FrequencyGrid, opts: &BasisOptions) -> Result<Self> {
        let (core, core_offset) = sgrid.central_subgrid(opts.core_half_width)?;
        let tails = if core.n() < sgrid.n() {
            let k0 = fgrid.fourier_offset(&sgrid).ok_or_else(|| {
                Error::Grid(
                    "a dense core smaller than the grid needs a Fourier-dual frequency grid".into(),
                )
            })?;
            Some(Tails { fourier: Fourier::new(sgrid), k0 })
        } else {
            None
        };
        let m = fgrid.m();
        let nc = core.n();
        let mut cols = vec![C64::new(0.0, 0.0); m * nc];
        let coeffs: Vec<ScatteringCoeffs> = cols
            .par_chunks_mut(nc)
            .enumerate()
            .map(|(i, col)| {
                let xi = fgrid.positive(i);
                let sol = integrate_jost_plus(xi, &core, &opts.jost)?;
                let sc = ScatteringCoeffs::from_jost(&sol)?;
                let scale = sc.t * inv_sqrt_2pi();
                for (c, f) in col.iter_mut().zip(&sol.sol.f.values) {
                    *c = f * scale;
                }
                Ok(sc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sgrid,
            fgrid,
            mode: opts.jost.mode,
            core,
            core_offset,
            cols,
            coeffs,
            wx: sgrid.weights(),
            wxi: fgrid.weights(),
            tails,
        })
    }

    pub fn spatial_grid(&self) -> &SpatialGrid {
        &self.sgrid
    }

    pub fn frequency_grid(&self) -> &FrequencyGrid {
        &self.fgrid
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn core_grid(&self) -> &SpatialGrid {
        &self.core
    }

    pub fn has_tails(&self) -> bool {
        self.tails.is_some()
    }

    /// Scattering data of the `i`-th positive frequency.
    pub fn coeffs(&self, i: usize) -> &ScatteringCoeffs {
        &self.coeffs[i]
    }

    pub fn all_coeffs(&self) -> &[ScatteringCoeffs] {
        &self.coeffs
    }

    fn col(&self, i: usize) -> &[C64] {
        let nc = self.core.n();
        &self.cols[i * nc..(i + 1) * nc]
    }

    /// Outgoing profile used outside the core.
    #[inline]
    fn profile(&self, x: f64, xi: f64) -> C64 {
        let e = C64::from_polar(1.0, x * xi);
        match self.mode {
            Mode::Potential => e * C64::new(1.0, 1.0 / (x * xi)),
            Mode::Free => e,
        }
    }

    /// `e(x_j, xi_k)` for grid index `j` and frequency storage index `k`.
    pub fn entry(&self, j: usize, k: usize) -> C64 {
        let m = self.fgrid.m();
        let (i, jj) = if k >= m { (k - m, j) } else { (m - 1 - k, self.sgrid.mirror(j)) };
        let lo = self.core_offset;
        if jj >= lo && jj < lo + self.core.n() {
            return self.col(i)[jj - lo];
        }
        // Tail: jj lies outside the core, evaluate with the positive frequency.
        let x = self.sgrid.x(jj);
        let xi = self.fgrid.positive(i);
        let sc = &self.coeffs[i];
        let h = self.profile(x, xi);
        let v = if x > 0.0 { sc.t * h } else { h + sc.r * self.profile(x, -xi) };
        v * inv_sqrt_2pi()
    }

    /// `e(., xi_k)` on the full grid.
    pub fn column(&self, k: usize) -> ComplexField {
        let values = (0..self.sgrid.n()).map(|j| self.entry(j, k)).collect();
        ComplexField { grid: self.sgrid, values }
    }

    fn check_field(&self, f: &ComplexField) -> Result<()> {
        if f.grid.same_as(&self.sgrid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("field on {:?}, basis on {:?}", f.grid, self.sgrid)))
        }
    }

    fn check_spec(&self, s: &SpectralField) -> Result<()> {
        if s.grid.same_as(&self.fgrid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("spectrum on {:?}, basis on {:?}", s.grid, self.fgrid)))
        }
    }

    /// `f~(xi) = int f(x) conj(e(x, xi)) dx`.
    pub fn forward(&self, f: &ComplexField) -> Result<SpectralField> {
        self.check_field(f)?;
        let m = self.fgrid.m();
        let nc = self.core.n();
        let lo = self.core_offset;
        let g: Vec<C64> = f.values.iter().zip(&self.wx).map(|(v, w)| v * w).collect();
        let core = &g[lo..lo + nc];
        let mut out = vec![C64::new(0.0, 0.0); 2 * m];
        let pairs: Vec<(C64, C64)> = self
            .cols
            .par_chunks(nc)
            .map(|col| {
                let mut plus = C64::new(0.0, 0.0);
                let mut minus = C64::new(0.0, 0.0);
                for (r, c) in col.iter().enumerate() {
                    let cc = c.conj();
                    plus += cc * core[r];
                    minus += cc * core[nc - 1 - r];
                }
                (plus, minus)
            })
            .collect();
        for (i, (p, q)) in pairs.into_iter().enumerate() {
            out[self.fgrid.index_pos(i)] = p;
            out[self.fgrid.index_neg(i)] = q;
        }
        if let Some(t) = &self.tails {
            self.forward_tails(t, &g, &mut out);
        }
        Ok(SpectralField { grid: self.fgrid, values: out })
    }

    fn forward_tails(&self, t: &Tails, g: &[C64], out: &mut [C64]) {
        let n = self.sgrid.n();
        let lo = self.core_offset;
        let hi = lo + self.core.n();
        let zero = C64::new(0.0, 0.0);
        let free = self.mode == Mode::Free;
        // s0 = sum g e^{-ix xi}, s1 = sum (g/x) e^{-ix xi}, per side.
        let side = |right: bool| -> (Vec<C64>, Vec<C64>) {
            let mut s0 = vec![zero; n];
            let mut s1 = vec![zero; n];
            let range: Box<dyn Iterator<Item = usize>> =
                if right { Box::new(hi..n) } else { Box::new(0..lo) };
            for j in range {
                s0[j] = g[j];
                s1[j] = g[j] / self.sgrid.x(j);
            }
            t.fourier.forward(&mut s0);
            if !free {
                t.fourier.forward(&mut s1);
            }
            (s0, s1)
        };
        let (r0, r1) = side(true);
        let (l0, l1) = side(false);
        let x0 = self.sgrid.x_min();
        let m = self.fgrid.m();
        let bin = |k: isize| -> usize { k.rem_euclid(n as isize) as usize };
        // P(xi) = sum g conj(H(x, xi)), Q(xi) = sum g H(x, xi).
        let eval = |s0: &[C64], s1: &[C64], xi: f64, k: isize| -> (C64, C64) {
            let shift = C64::from_polar(1.0, -x0 * xi);
            let a0 = s0[bin(k)] * shift;
            let b0 = s0[bin(-k)] * shift.conj();
            if free {
                return (a0, b0);
            }
            let a1 = s1[bin(k)] * shift;
            let b1 = s1[bin(-k)] * shift.conj();
            (a0 - I / xi * a1, b0 + I / xi * b1)
        };
        let c = inv_sqrt_2pi();
        for i in 0..m {
            let xi = self.fgrid.positive(i);
            let k = (t.k0 + i) as isize;
            let sc = &self.coeffs[i];
            let (pr, qr) = eval(&r0, &r1, xi, k);
            let (pl, ql) = eval(&l0, &l1, xi, k);
            // xi > 0: right A = T, B = 0; left A = 1, B = R.
            out[self.fgrid.index_pos(i)] += c * (sc.t.conj() * pr + pl + sc.r.conj() * ql);
            // -xi: left A = T, B = 0; right A = 1, B = R (profiles at -xi swap P and Q).
            out[self.fgrid.index_neg(i)] += c * (sc.t.conj() * ql + qr + sc.r.conj() * pr);
        }
    }

    /// `f(x) = int f~(xi) e(x, xi) dxi`.
    pub fn inverse(&self, spec: &SpectralField) -> Result<ComplexField> {
        self.check_spec(spec)?;
        let m = self.fgrid.m();
        let nc = self.core.n();
        let n = self.sgrid.n();
        let lo = self.core_offset;
        let c: Vec<C64> = spec.values.iter().zip(&self.wxi).map(|(v, w)| v * w).collect();
        let a: Vec<C64> = (0..m).map(|i| c[self.fgrid.index_pos(i)]).collect();
        let b: Vec<C64> = (0..m).map(|i| c[self.fgrid.index_neg(i)]).collect();
        const BLOCK: usize = 256;
        let zero = C64::new(0.0, 0.0);
        let mut u1 = vec![zero; nc];
        let mut u2 = vec![zero; nc];
        u1.par_chunks_mut(BLOCK)
            .zip(u2.par_chunks_mut(BLOCK))
            .enumerate()
            .for_each(|(blk, (o1, o2))| {
                let start = blk * BLOCK;
                for i in 0..m {
                    let col = &self.col(i)[start..start + o1.len()];
                    let (ai, bi) = (a[i], b[i]);
                    for ((p, q), e) in o1.iter_mut().zip(o2.iter_mut()).zip(col) {
                        *p += ai * e;
                        *q += bi * e;
                    }
                }
            });
        let mut out = vec![zero; n];
        for r in 0..nc {
            out[lo + r] = u1[r] + u2[nc - 1 - r];
        }
        if let Some(t) = &self.tails {
            self.inverse_tails(t, &c, &mut out);
        }
        Ok(ComplexField { grid: self.sgrid, values: out })
    }

    fn inverse_tails(&self, t: &Tails, c: &[C64], out: &mut [C64]) {
        let n = self.sgrid.n();
        let m = self.fgrid.m();
        let lo = self.core_offset;
        let hi = lo + self.core.n();
        let x0 = self.sgrid.x_min();
        let zero = C64::new(0.0, 0.0);
        let free = self.mode == Mode::Free;
        let bin = |k: isize| -> usize { k.rem_euclid(n as isize) as usize };
        // sqrt(2 pi) u(x) = sum_k d_k H(x, xi_k) on each side.
        let side = |right: bool| -> Vec<C64> {
            let mut s0 = vec![zero; n];
            let mut s1 = vec![zero; n];
            for i in 0..m {
                let xi = self.fgrid.positive(i);
                let k = (t.k0 + i) as isize;
                let sc = &self.coeffs[i];
                let (cp, cn) = (c[self.fgrid.index_pos(i)], c[self.fgrid.index_neg(i)]);
                let (dp, dn) = if right { (cp * sc.t + cn * sc.r, cn) } else { (cp, cn * sc.t + cp * sc.r) };
                let shift = C64::from_polar(1.0, x0 * xi);
                s0[bin(k)] = dp * shift;
                s0[bin(-k)] = dn * shift.conj();
                s1[bin(k)] = dp * shift / xi;
                s1[bin(-k)] = -dn * shift.conj() / xi;
            }
            t.fourier.inverse(&mut s0);
            if !free {
                t.fourier.inverse(&mut s1);
            }
            let range: Vec<usize> = if right { (hi..n).collect() } else { (0..lo).collect() };
            let mut vals = vec![zero; n];
            for j in range {
                let x = self.sgrid.x(j);
                vals[j] = if free { s0[j] } else { s0[j] + I / x * s1[j] };
            }
            vals
        };
        let cst = inv_sqrt_2pi();
        let right = side(true);
        let left = side(false);
        for j in (0..lo).chain(hi..n) {
            out[j] = cst * (right[j] + left[j]);
        }
    }

    /// Quadrature weights on the spatial grid.
    pub fn spatial_weights(&self) -> &[f64] {
        &self.wx
    }

    /// Quadrature weights on the frequency grid.
    pub fn frequency_weights(&self) -> &[f64] {
        &self.wxi
    }

    /// Maximum eigen-equation residual `|-e'' + V e - xi^2 e| / max|e|` of the
    /// core column `k`, using fourth-order differences away from the core edges.
    pub fn column_residual(&self, k: usize) -> Result<f64> {
        let col = self.column(k);
        let xi = self.fgrid.value(k);
        let d1 = derivative_x(&col)?;
        let d2 = derivative_x(&d1)?;
        let scale = col.values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        let lo = self.core_offset + 4;
        let hi = self.core_offset + self.core.n() - 4;
        let mut worst: f64 = 0.0;
        for j in lo..hi {
            let x = self.sgrid.x(j);
            let r = -d2.values[j] + (self.mode.potential(x) - xi * xi) * col.values[j];
            worst = worst.max(r.norm() / scale);
        }
        Ok(worst)
    }
}

/// `|‖f~‖ - ‖f‖| / ‖f‖`.
pub fn plancherel_defect(f: &ComplexField, basis: &DistortedBasis) -> Result<f64> {
    let nf = l2_norm(f);
    if nf == 0.0 {
        return Ok(0.0);
    }
    let spec = basis.forward(f)?;
    Ok((l2_norm(&spec) - nf).abs() / nf)
}

/// Relative L2 defect of `inverse(forward(f))`.
pub fn round_trip_defect(f: &ComplexField, basis: &DistortedBasis) -> Result<f64> {
    let back = basis.inverse(&basis.forward(f)?)?;
    crate::core::relative_l2(&back, f)
}

/// Certified size of the excluded band `|xi| < xi_min`: with `|f~(xi)| <= C xi^2`,
/// the band carries `L2` mass at most `C^2 * 2 xi_min^5 / 5`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandEstimate {
    /// Measured constant `max |f~| / xi^2` over the lowest retained frequencies.
    pub constant: f64,
    pub weighted_l1: f64,
    /// Upper bound on the L2 norm of the discarded band.
    pub band_l2: f64,
}

pub fn band_estimate(f: &ComplexField, spec: &SpectralField) -> BandEstimate {
    let g = spec.grid;
    let probe = g.m().min(8);
    let mut constant: f64 = 0.0;
    for i in 0..probe {
        let xi = g.positive(i);
        for k in [g.index_pos(i), g.index_neg(i)] {
            constant = constant.max(spec.values[k].norm() / (xi * xi));
        }
    }
    let weighted_l1 = crate::core::norms(f).weighted_l1;
    let band_l2 = (constant * constant * 2.0 * g.xi_min().powi(5) / 5.0).sqrt();
    BandEstimate { constant, weighted_l1, band_l2 }
}

/// Polynomial smooth step: 0 for `u <= 1/2`, 1 for `u >= 1`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.5 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let t = 2.0 * (u - 0.5);
        t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

/// `e(x, xi) = e^{ix xi} a(x, xi) + e^{-ix xi} b(x, xi)` with `b` supported where
/// `x xi <= -1/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbSplit {
    pub xi: f64,
    pub a: ComplexField,
    pub b: ComplexField,
    pub chi: &'static str,
    /// `max |e - e^{ix xi} a - e^{-ix xi} b| / max |e|` on the core.
    pub reconstruction_defect: f64,
}

/// Split of the `i`-th positive-frequency eigenfunction on the dense core.
pub fn split_ab(i: usize, basis: &DistortedBasis) -> Result<AbSplit> {
    let g = basis.core;
    let xi = basis.fgrid.positive(i);
    let sc = basis.coeffs[i];
    let col = basis.col(i);
    // f_+ on the core from the stored column.
    let scale = sc.t * inv_sqrt_2pi();
    let fplus: Vec<C64> = col.iter().map(|e| e / scale).collect();
    let c = inv_sqrt_2pi();
    let n = g.n();
    let mut a = vec![C64::new(0.0, 0.0); n];
    let mut b = vec![C64::new(0.0, 0.0); n];
    let mut defect: f64 = 0.0;
    let mut emax: f64 = 0.0;
    for j in 0..n {
        let x = g.x(j);
        let chi = smooth_step(-x * xi);
        let fm = fplus[n - 1 - j]; // f_-(x, xi) = f_+(-x, xi)
        let fm_neg = fm.conj(); // f_-(x, -xi)
        let phase = C64::from_polar(1.0, x * xi);
        a[j] = c * phase.conj() * ((1.0 - chi) * sc.t * fplus[j] + chi * fm_neg);
        b[j] = c * phase * chi * sc.r * fm;
        let e = col[j];
        defect = defect.max((e - phase * a[j] - phase.conj() * b[j]).norm());
        emax = emax.max(e.norm());
    }
    let reconstruction_defect = defect / emax.max(1e-300);
    if reconstruction_defect > 1e-8 {
        return Err(Error::Consistency(format!(
            "a/b reconstruction defect {reconstruction_defect:e} at xi = {xi}"
        )));
    }
    Ok(AbSplit {
        xi,
        a: ComplexField::new(g, a)?,
        b: ComplexField::new(g, b)?,
        chi: "smoothstep u^3(10 - 15u + 6u^2) rescaled to [1/2, 1]",
        reconstruction_defect,
    })
}

/// The four ratios comparing derivative and weight norms across the transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivNormReport {
    /// `‖f~'‖ / ‖<x> f‖`
    pub spectral_derivative_vs_weight: f64,
    /// `‖f'‖ / ‖xi f~‖`
    pub derivative_vs_spectral_weight: f64,
    /// `‖x f‖ / ‖f~'‖`
    pub weight_vs_spectral_derivative: f64,
    /// `‖xi f~‖ / (‖f'‖ + ‖<x>^{-1} f‖)`
    pub spectral_weight_vs_derivative: f64,
}

pub fn deriv_norm_checks(f: &ComplexField, basis: &DistortedBasis) -> Result<DerivNormReport> {
    let spec = basis.forward(f)?;
    let dspec = derivative_xi(&spec)?;
    let xi_spec = spec.map(|xi, v| v * xi);
    let df = derivative_x(f)?;
    let jx = f.map(|x, v| v * (1.0 + x * x).sqrt());
    let xf = f.map(|x, v| v * x);
    let inv_jx = f.map(|x, v| v / (1.0 + x * x).sqrt());
    let (n_dspec, n_xispec) = (l2_norm(&dspec), l2_norm(&xi_spec));
    Ok(DerivNormReport {
        spectral_derivative_vs_weight: n_dspec / l2_norm(&jx),
        derivative_vs_spectral_weight: l2_norm(&df) / n_xispec,
        weight_vs_spectral_derivative: l2_norm(&xf) / n_dspec,
        spectral_weight_vs_derivative: n_xispec / (l2_norm(&df) + l2_norm(&inv_jx)),
    })
}
