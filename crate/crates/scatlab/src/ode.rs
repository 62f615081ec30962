//! Adaptive Dormand-Prince 5(4) integrator for small complex systems.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order solution minus embedded fourth-order solution.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |h|.
    pub h_max: f64,
    pub max_steps: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl Dopri5 {
    pub fn new(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, h_max: f64::INFINITY, max_steps: 10_000_000 }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    /// Integrate `y' = rhs(x, y)` from `(x0, y0)` and return the solution at each
    /// of the monotone abscissae `targets` (all on the same side of `x0`).
    pub fn solve<const N: usize>(
        &self,
        mut rhs: impl FnMut(f64, &[C64; N]) -> [C64; N],
        x0: f64,
        y0: [C64; N],
        targets: &[f64],
    ) -> Result<(Vec<[C64; N]>, OdeStats)> {
        let mut stats = OdeStats::default();
        let mut out = Vec::with_capacity(targets.len());
        let Some(&last) = targets.last() else {
            return Ok((out, stats));
        };
        let dir = if last >= x0 { 1.0 } else { -1.0 };
        let mut x = x0;
        let mut y = y0;
        let mut k1 = rhs(x, &y);
        stats.evaluations += 1;
        let mut h = self.initial_step(x0, last, &y, &k1) * dir;

        for &target in targets {
            if (target - x) * dir < 0.0 {
                return Err(Error::Integration {
                    x: target,
                    reason: "targets are not monotone".into(),
                });
            }
            while (target - x) * dir > 0.0 {
                if stats.accepted + stats.rejected >= self.max_steps {
                    return Err(Error::Integration { x, reason: "step budget exhausted".into() });
                }
                let remaining = target - x;
                let clamped = h.abs() >= remaining.abs();
                let step = if clamped { remaining } else { h };
                if step.abs() < 1e-14 * x.abs().max(1.0) {
                    return Err(Error::Integration { x, reason: "step size underflow".into() });
                }
                let (y_new, k7, err) = self.stage(&mut rhs, x, &y, &k1, step);
                stats.evaluations += 6;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if err <= 1.0 {
                    stats.accepted += 1;
                    x = if clamped { target } else { x + step };
                    y = y_new;
                    k1 = k7;
                    if !clamped || factor < 1.0 {
                        h = step * factor;
                    }
                } else {
                    stats.rejected += 1;
                    h = step * factor.min(1.0);
                }
                h = h.signum() * h.abs().min(self.h_max);
                if !y.iter().all(|v| v.is_finite()) {
                    return Err(Error::Integration { x, reason: "non-finite state".into() });
                }
            }
            out.push(y);
        }
        Ok((out, stats))
    }

    fn initial_step<const N: usize>(&self, x0: f64, x1: f64, y: &[C64; N], f: &[C64; N]) -> f64 {
        let scale = |v: &C64| self.atol + self.rtol * v.norm();
        let d0 = y.iter().map(|v| (v.norm() / scale(v)).powi(2)).sum::<f64>().sqrt();
        let d1 = f.iter().zip(y).map(|(d, v)| (d.norm() / scale(v)).powi(2)).sum::<f64>().sqrt();
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min((x1 - x0).abs()).min(self.h_max).max(1e-12)
    }

    fn stage<const N: usize>(
        &self,
        rhs: &mut impl FnMut(f64, &[C64; N]) -> [C64; N],
        x: f64,
        y: &[C64; N],
        k1: &[C64; N],
        h: f64,
    ) -> ([C64; N], [C64; N], f64) {
        let mut k = [[C64::new(0.0, 0.0); N]; 7];
        k[0] = *k1;
        for s in 1..7 {
            let mut ys = *y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (r, a) in A[s].iter().enumerate().take(s) {
                    acc += k[r][i] * *a;
                }
                *yi += acc * h;
            }
            k[s] = rhs(x + C[s] * h, &ys);
        }
        // Row 6 of A holds the fifth-order weights, so the last stage input is y_new.
        let mut y_new = *y;
        for (i, yi) in y_new.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (r, a) in A[6].iter().enumerate() {
                acc += k[r][i] * *a;
            }
            *yi += acc * h;
        }
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut e = C64::new(0.0, 0.0);
            for (r, c) in E.iter().enumerate() {
                e += k[r][i] * *c;
            }
            let sc = self.atol + self.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max((e * h).norm() / sc);
        }
        (y_new, k[6], err)
    }
}
