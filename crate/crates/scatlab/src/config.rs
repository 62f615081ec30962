//! Flat TOML run configuration. Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::core::{FrequencyGrid, SpatialGrid};
use crate::dft::BasisOptions;
use crate::error::{Error, Result};
use crate::jost::{JostOptions, Mode};
use crate::nls::{default_record_times, LinearStep, SolverConfig};
use crate::scatter::VelocityGrid;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,

    // Grid for scattering data and the linear transform.
    pub x_max: f64,
    pub n: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    pub m: usize,
    /// Dense-core half width of the distorted basis; 0 keeps the basis fully dense.
    pub core_half_width: f64,
    pub jost_tol: f64,
    pub rho_threshold: f64,
    /// Interior half width `delta / xi` of the zero-energy system.
    pub phi_delta: f64,

    // Linear decay fits.
    pub fit_t_min: f64,
    pub fit_t_max: f64,
    pub fit_samples: usize,
    pub gamma: f64,
    /// One of `gaussian`, `modulated`, `odd`.
    pub data: String,
    /// Frequencies written by `basis`.
    pub basis_xi: Vec<f64>,

    // Nonlinear evolution on a wide periodic grid.
    pub nls_dx: f64,
    pub nls_n: usize,
    pub nls_core_half_width: f64,
    pub mu: i32,
    pub epsilon: f64,
    /// Smaller amplitude used by the acceptance comparison run.
    pub epsilon_small: f64,
    pub t_end: f64,
    pub dt0: f64,
    pub dt_max: f64,
    /// Empty means `t_end 2^{-k/4}` down to 1.
    pub record: Vec<f64>,
    pub delta: f64,
    pub linear_step: LinearStep,
    /// Snapshot files keep `|x| <= snapshot_x_max`.
    pub snapshot_x_max: f64,

    // Wave-packet profiles.
    pub v_max: f64,
    pub v_count: usize,

    /// Recorded in the hash only: no computation draws random numbers.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Potential,
            x_max: 400.0,
            n: 16001,
            xi_min: 5e-3,
            xi_max: 8.0,
            m: 4000,
            core_half_width: 0.0,
            jost_tol: 1e-10,
            rho_threshold: 50.0,
            phi_delta: 0.5,
            fit_t_min: 10.0,
            fit_t_max: 200.0,
            fit_samples: 20,
            gamma: 0.6,
            data: "gaussian".into(),
            basis_xi: vec![0.2],
            nls_dx: 0.125,
            nls_n: 1 << 18,
            nls_core_half_width: 30.0,
            mu: 1,
            epsilon: 0.05,
            epsilon_small: 0.02,
            t_end: 400.0,
            dt0: 0.01,
            dt_max: 0.1,
            record: Vec::new(),
            delta: 0.1,
            linear_step: LinearStep::Split,
            snapshot_x_max: 5000.0,
            v_max: 12.0,
            v_count: 801,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        self.spatial_grid().map_err(|e| Error::Config(e.to_string()))?;
        self.frequency_grid().map_err(|e| Error::Config(e.to_string()))?;
        self.nls_grid().map_err(|e| Error::Config(e.to_string()))?;
        self.velocity_grid().map_err(|e| Error::Config(e.to_string()))?;
        if self.core_half_width < 0.0 || self.nls_core_half_width < 0.0 {
            return bad("core half widths must be >= 0");
        }
        if !(self.jost_tol > 0.0 && self.jost_tol < 1e-3) {
            return bad("jost_tol must lie in (0, 1e-3)");
        }
        if !(self.fit_t_min >= 1.0 && self.fit_t_max > self.fit_t_min && self.fit_samples >= 2) {
            return bad("need 1 <= fit_t_min < fit_t_max and fit_samples >= 2");
        }
        if !(0.5..1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0.5, 1)");
        }
        if !["gaussian", "modulated", "odd"].contains(&self.data.as_str()) {
            return Err(Error::Config(format!("unknown data preset `{}`", self.data)));
        }
        if self.basis_xi.iter().any(|&x| !(x > 0.0)) {
            return bad("basis_xi entries must be positive");
        }
        if !(self.epsilon_small > 0.0 && self.epsilon_small < self.epsilon) {
            return bad("need 0 < epsilon_small < epsilon");
        }
        if !(self.snapshot_x_max > 0.0) {
            return bad("snapshot_x_max must be positive");
        }
        self.solver().validate()
    }

    /// Canonical TOML text; parsing it gives back an identical config.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.x_max, self.n)
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(self.xi_min, self.xi_max, self.m)
    }

    pub fn nls_grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::with_spacing(self.nls_dx, self.nls_n)
    }

    /// Fourier-dual frequencies of the NLS grid, from the first nonzero one to `xi_max`.
    pub fn nls_frequency_grid(&self) -> Result<FrequencyGrid> {
        let g = self.nls_grid()?;
        FrequencyGrid::fourier_dual(&g, g.fourier_spacing(), self.xi_max)
    }

    pub fn velocity_grid(&self) -> Result<VelocityGrid> {
        VelocityGrid::new(self.v_max, self.v_count)
    }

    pub fn jost(&self) -> JostOptions {
        JostOptions { tol: self.jost_tol, rho_threshold: self.rho_threshold, mode: self.mode }
    }

    pub fn basis_options(&self) -> BasisOptions {
        let core = if self.core_half_width > 0.0 { self.core_half_width } else { f64::INFINITY };
        BasisOptions { jost: self.jost(), core_half_width: core }
    }

    pub fn nls_basis_options(&self) -> BasisOptions {
        let core = if self.nls_core_half_width > 0.0 { self.nls_core_half_width } else { f64::INFINITY };
        BasisOptions { jost: self.jost(), core_half_width: core }
    }

    pub fn fit_times(&self) -> Vec<f64> {
        crate::core::log_space(self.fit_t_min, self.fit_t_max, self.fit_samples)
    }

    pub fn solver(&self) -> SolverConfig {
        let record_times =
            if self.record.is_empty() { default_record_times(self.t_end) } else { self.record.clone() };
        SolverConfig {
            mu: self.mu,
            epsilon: self.epsilon,
            t_end: self.t_end,
            dt0: self.dt0,
            dt_max: self.dt_max,
            record_times,
            delta: self.delta,
            linear_step: self.linear_step,
        }
    }
}
