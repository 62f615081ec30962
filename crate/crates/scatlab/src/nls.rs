//! Strang-split solver for `i u_t + L u = mu |u|^2 u` started at `t = 1`
//! from `u(1) = e^{iL} u_*`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::core::{l2_norm, linf_norm, ComplexField, Fourier};
use crate::dft::DistortedBasis;
use crate::error::{Error, Result};
use crate::galilei::{jv_norm, Derivative};
use crate::jost::Mode;
use crate::prop::{evolve_linear, propagate_spectrum};

/// `‖<x> g‖_2 + ‖g‖_{H^1}` for `g = e^{-x^2}`.
pub const GAUSSIAN_DATA_NORM: f64 = 2.834_889_458_846_921;

/// Linear substep of the splitting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearStep {
    /// `e^{i xi^2 dt}` in the distorted basis.
    Distorted,
    /// Potential folded into the pointwise phase, `e^{i k^2 dt}` by FFT on the
    /// periodic grid. Exactly unitary.
    #[default]
    Split,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Sign of the nonlinearity; 0 gives the linear flow.
    pub mu: i32,
    pub epsilon: f64,
    pub t_end: f64,
    pub dt0: f64,
    /// Cap on the step once it grows with `t`.
    pub dt_max: f64,
    pub record_times: Vec<f64>,
    /// Weight exponent in `B(T)`.
    pub delta: f64,
    pub linear_step: LinearStep,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mu: 1,
            epsilon: 0.05,
            t_end: 200.0,
            dt0: 0.01,
            dt_max: 0.1,
            record_times: default_record_times(200.0),
            delta: 0.1,
            linear_step: LinearStep::Split,
        }
    }
}

/// `t_end 2^{-k/4}` down to 1, plus `t = 1`, in increasing order.
pub fn default_record_times(t_end: f64) -> Vec<f64> {
    let mut times = vec![1.0];
    let kmax = (4.0 * t_end.log2()).floor() as i32;
    for k in (0..=kmax).rev() {
        let t = t_end * 2f64.powf(-k as f64 / 4.0);
        if t > 1.0 + 1e-9 {
            times.push(t);
        }
    }
    times
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(-1..=1).contains(&self.mu) {
            return Err(Error::Config(format!("mu must be -1, 0 or 1, got {}", self.mu)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if !(self.t_end >= 1.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be >= 1, got {}", self.t_end)));
        }
        if !(self.dt0 > 0.0 && self.dt0 <= 0.01) {
            return Err(Error::Config(format!("dt0 must lie in (0, 0.01], got {}", self.dt0)));
        }
        if !(self.dt_max >= self.dt0) {
            return Err(Error::Config("dt_max must be >= dt0".into()));
        }
        if self.record_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("record_times must be strictly increasing".into()));
        }
        if self.record_times.iter().any(|&t| !(1.0..=self.t_end).contains(&t)) {
            return Err(Error::Config("record_times must lie in [1, t_end]".into()));
        }
        Ok(())
    }

    /// `dt(t) = min(dt_max, dt0 max(1, t/10))`.
    pub fn step_size(&self, t: f64) -> f64 {
        (self.dt0 * (t / 10.0).max(1.0)).min(self.dt_max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionState {
    pub t: f64,
    pub u: ComplexField,
    pub mass: f64,
}

impl EvolutionState {
    pub fn new(t: f64, u: ComplexField) -> Self {
        let mass = l2_norm(&u).powi(2);
        Self { t, u, mass }
    }
}

/// `‖<x> f‖_2 + ‖f‖_{H^1}` with a spectral derivative.
pub fn data_norm(f: &ComplexField) -> Result<f64> {
    let df = Derivative::Spectral.apply(f)?;
    let weighted = l2_norm(&f.map(|x, v| v * (1.0 + x * x).sqrt()));
    let h1 = (l2_norm(f).powi(2) + l2_norm(&df).powi(2)).sqrt();
    Ok(weighted + h1)
}

/// `u_* = epsilon c e^{-x^2}` normalised to data norm `epsilon`.
pub fn cauchy_data(epsilon: f64, grid: crate::core::SpatialGrid) -> ComplexField {
    let c = epsilon / GAUSSIAN_DATA_NORM;
    ComplexField::from_real_fn(grid, |x| c * (-x * x).exp())
}

/// State at `t = 1`: `e^{iL} u_*`.
pub fn initial_data(epsilon: f64, basis: &DistortedBasis) -> Result<EvolutionState> {
    let data = cauchy_data(epsilon, *basis.spatial_grid());
    Ok(EvolutionState::new(1.0, evolve_linear(&data, 1.0, basis)?))
}

/// Linear propagator for one substep.
pub enum LinearFlow<'a> {
    Distorted(&'a DistortedBasis),
    Split(SplitPropagator),
}

impl<'a> LinearFlow<'a> {
    pub fn new(kind: LinearStep, basis: &'a DistortedBasis) -> Self {
        match kind {
            LinearStep::Distorted => LinearFlow::Distorted(basis),
            LinearStep::Split => LinearFlow::Split(SplitPropagator::new(*basis.spatial_grid(), basis.mode())),
        }
    }
}

pub struct SplitPropagator {
    fourier: Fourier,
    potential: Vec<f64>,
}

impl SplitPropagator {
    pub fn new(grid: crate::core::SpatialGrid, mode: Mode) -> Self {
        let potential = grid.points().iter().map(|&x| mode.potential(x)).collect();
        Self { fourier: Fourier::new(grid), potential }
    }

    fn kinetic(&self, values: &mut [C64], dt: f64) {
        self.fourier.apply_multiplier(values, |k| C64::from_polar(1.0, k * k * dt));
    }

    fn potential_phase(&self, values: &mut [C64], h: f64) {
        for (v, &pot) in values.iter_mut().zip(&self.potential) {
            *v *= C64::from_polar(1.0, pot * h);
        }
    }

    /// `e^{itL} f` by the fourth-order triple-jump composition of linear
    /// Strang steps.
    pub fn evolve_linear(&self, f: &ComplexField, t: f64, steps: usize) -> ComplexField {
        let cbrt2 = 2f64.powf(1.0 / 3.0);
        let outer = 1.0 / (2.0 - cbrt2);
        let inner = -cbrt2 / (2.0 - cbrt2);
        let h = t / steps.max(1) as f64;
        let mut values = f.values.clone();
        for _ in 0..steps.max(1) {
            for w in [outer, inner, outer] {
                self.potential_phase(&mut values, 0.5 * w * h);
                self.kinetic(&mut values, w * h);
                self.potential_phase(&mut values, 0.5 * w * h);
            }
        }
        ComplexField { grid: f.grid, values }
    }
}

/// Steps per unit time for the split pre-evolution to `t = 1`.
const SPLIT_INITIAL_STEPS: usize = 100;

fn nonlinear_phase(values: &mut [C64], mu: f64, h: f64) {
    for v in values.iter_mut() {
        *v *= C64::from_polar(1.0, -mu * v.norm_sqr() * h);
    }
}

/// One Strang step: half nonlinear phase, linear step, half nonlinear phase.
pub fn strang_step(state: &EvolutionState, dt: f64, mu: i32, flow: &LinearFlow) -> Result<EvolutionState> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {dt}")));
    }
    let mu = mu as f64;
    let mut values = state.u.values.clone();
    match flow {
        LinearFlow::Distorted(basis) => {
            nonlinear_phase(&mut values, mu, 0.5 * dt);
            let half = ComplexField { grid: state.u.grid, values };
            let spec = propagate_spectrum(&basis.forward(&half)?, dt);
            values = basis.inverse(&spec)?.values;
            nonlinear_phase(&mut values, mu, 0.5 * dt);
        }
        LinearFlow::Split(p) => {
            // u_t = i(V - mu |u|^2) u is solved exactly since |u| is frozen.
            let rotate = |values: &mut [C64]| {
                for (v, &pot) in values.iter_mut().zip(&p.potential) {
                    *v *= C64::from_polar(1.0, (pot - mu * v.norm_sqr()) * 0.5 * dt);
                }
            };
            rotate(&mut values);
            p.kinetic(&mut values, dt);
            rotate(&mut values);
        }
    }
    let t = state.t + dt;
    if !values.iter().all(|v| v.is_finite()) {
        return Err(Error::BlowUp(t));
    }
    Ok(EvolutionState::new(t, ComplexField { grid: state.u.grid, values }))
}

/// Bootstrap quantities `A = t^{1/2} ‖u‖_inf` and `B = t^{-delta} ‖<J_V> u‖_2`
/// at the record times.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSeries {
    pub times: Vec<f64>,
    pub a_vals: Vec<f64>,
    pub b_vals: Vec<f64>,
    pub jv_norms: Vec<f64>,
    pub masses: Vec<f64>,
    pub delta: f64,
}

impl BootstrapSeries {
    pub fn push(&mut self, state: &EvolutionState, basis: &DistortedBasis) -> Result<()> {
        let t = state.t;
        let jv = jv_norm(&basis.forward(&state.u)?, t)?;
        let bracket = (state.mass + jv * jv).sqrt();
        self.times.push(t);
        self.a_vals.push(t.sqrt() * linf_norm(&state.u));
        self.b_vals.push(t.powf(-self.delta) * bracket);
        self.jv_norms.push(jv);
        self.masses.push(state.mass);
        Ok(())
    }

    /// `A(T) = sup_{t < T} t^{1/2} ‖u‖_inf` over the recorded samples.
    pub fn a_sup(&self) -> f64 {
        self.a_vals.iter().copied().fold(0.0, f64::max)
    }

    pub fn b_sup(&self) -> f64 {
        self.b_vals.iter().copied().fold(0.0, f64::max)
    }

    /// Largest relative mass change against the first sample.
    pub fn mass_drift(&self) -> f64 {
        let Some(&m0) = self.masses.first() else { return 0.0 };
        if m0 == 0.0 {
            return 0.0;
        }
        self.masses.iter().map(|m| (m - m0).abs() / m0).fold(0.0, f64::max)
    }

    /// Log-log slope of `‖J_V u‖_2` over `[t_lo, t_hi]`.
    pub fn jv_slope(&self, t_lo: f64, t_hi: f64) -> Result<f64> {
        let (t, n): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&self.jv_norms)
            .filter(|(t, _)| **t >= t_lo && **t <= t_hi)
            .map(|(a, b)| (*a, *b))
            .unzip();
        crate::prop::log_log_fit(&t, &n).map(|(s, _)| s)
    }
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub state: EvolutionState,
    pub series: BootstrapSeries,
    /// Set when the run stopped early because the solution reached the boundary.
    pub aborted: Option<String>,
    pub steps: usize,
}

/// Fraction of the grid at each end checked for boundary amplitude.
const EDGE_FRACTION: f64 = 0.01;
const EDGE_TOLERANCE: f64 = 1e-8;
const MASS_TOLERANCE: f64 = 1e-6;

fn edge_amplitude(u: &ComplexField) -> f64 {
    let n = u.values.len();
    let w = ((n as f64 * EDGE_FRACTION) as usize).max(1);
    u.values[..w].iter().chain(&u.values[n - w..]).map(|v| v.norm()).fold(0.0, f64::max)
}

/// Evolve from `t = 1` to `t_end`; `on_record` sees each recorded state and may
/// keep a copy of it.
pub fn evolve(
    config: &SolverConfig,
    basis: &DistortedBasis,
    mut on_record: impl FnMut(&EvolutionState) -> Result<()>,
) -> Result<Evolution> {
    config.validate()?;
    let flow = LinearFlow::new(config.linear_step, basis);
    let mut state = match &flow {
        LinearFlow::Distorted(_) => initial_data(config.epsilon, basis)?,
        // Same flow as the steps, free of the frequency cut-off.
        LinearFlow::Split(p) => {
            let data = cauchy_data(config.epsilon, *basis.spatial_grid());
            EvolutionState::new(1.0, p.evolve_linear(&data, 1.0, SPLIT_INITIAL_STEPS))
        }
    };
    let mass0 = state.mass;
    let mut series = BootstrapSeries { delta: config.delta, ..Default::default() };
    let mut pending = config.record_times.iter().copied().peekable();
    let mut steps = 0;
    let mut aborted = None;
    loop {
        while let Some(&tr) = pending.peek() {
            if tr > state.t + 1e-9 {
                break;
            }
            pending.next();
            series.push(&state, basis)?;
            on_record(&state)?;
        }
        if state.t >= config.t_end - 1e-9 {
            break;
        }
        let mut target = state.t + config.step_size(state.t);
        if let Some(&tr) = pending.peek() {
            target = target.min(tr);
        }
        target = target.min(config.t_end);
        state = strang_step(&state, target - state.t, config.mu, &flow)?;
        state.t = target;
        steps += 1;
        // Boundary contact first: it is what spoils the mass on a periodic grid.
        if edge_amplitude(&state.u) > EDGE_TOLERANCE * linf_norm(&state.u) {
            aborted = Some(format!("solution reached the grid boundary at t = {}", state.t));
            break;
        }
        if mass0 > 0.0 && (state.mass - mass0).abs() > MASS_TOLERANCE * mass0 {
            return Err(Error::Accuracy(format!(
                "mass drifted by {:.3e} (relative) at t = {}",
                (state.mass - mass0).abs() / mass0,
                state.t
            )));
        }
    }
    Ok(Evolution { state, series, aborted, steps })
}
