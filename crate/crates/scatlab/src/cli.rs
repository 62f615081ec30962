//! Command-line front end. Every file written embeds the config hash.

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::core::{ComplexField, SpatialGrid};
use crate::dft::DistortedBasis;
use crate::error::{Error, Result};
use crate::galilei::{compare_fields, cubic_ratio, nullform_residual, CubicReport, Derivative, GalileiReport};
use crate::jost::{integrate_jost_plus, scattering_coeffs, JostOptions, Mode};
use crate::nls::{cauchy_data, evolve};
use crate::prop::{evolve_linear, preset, sample_decay};
use crate::scatter::{bump_chi, extract_asymptotics, ode_residual, remainder, ProfileSeries};
use crate::verify::{run_suite, CriterionResult};

/// Exit code for a failed acceptance run.
pub const EXIT_ACCEPTANCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "scatlab", version, about = "Scattering and long-time NLS dynamics for L = -d^2/dx^2 + 2/(1+x^2)")]
pub struct Cli {
    /// TOML configuration; defaults are used for missing keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Override the operator: `potential` or `free`.
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep T(xi), R(xi) over the frequency grid.
    Scatter,
    /// Write the generalized eigenfunctions e(x, xi).
    Basis {
        /// Comma-separated frequencies.
        #[arg(long, value_delimiter = ',')]
        xi: Vec<f64>,
    },
    /// Linear evolution and decay fits.
    EvolveLinear {
        #[arg(long)]
        data: Option<String>,
        #[arg(long, value_delimiter = ',')]
        times: Vec<f64>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// J_0 / J_V comparison and the cubic-estimate monitor.
    GalileiReport {
        #[arg(long)]
        data: Option<String>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 10.0, 100.0])]
        times: Vec<f64>,
    },
    /// Cubic NLS run with snapshots and diagnostics.
    EvolveNls {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<i32>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        dt0: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        record: Vec<f64>,
    },
    /// Wave-packet profiles and modified-scattering data from snapshot files.
    ExtractProfile {
        /// Directory holding `snapshot_*.csv`; defaults to `--out`.
        #[arg(long)]
        snapshots: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Verify,
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| match e {
            Error::Io(io) => Error::Config(format!("{}: {io}", p.display())),
            other => other,
        })?,
        None => RunConfig::default(),
    };
    if let Some(mode) = cli.mode {
        cfg.mode = mode;
    }
    let out = cli.out.clone();
    match cli.command {
        Command::Scatter => cmd_scatter(&cfg, &out),
        Command::Basis { xi } => {
            if !xi.is_empty() {
                cfg.basis_xi = xi;
            }
            cfg.validate()?;
            cmd_basis(&cfg, &out)
        }
        Command::EvolveLinear { data, times, gamma } => {
            if let Some(d) = data {
                cfg.data = d;
            }
            if let Some(g) = gamma {
                cfg.gamma = g;
            }
            cfg.validate()?;
            cmd_evolve_linear(&cfg, &times, &out)
        }
        Command::GalileiReport { data, times } => {
            if let Some(d) = data {
                cfg.data = d;
            }
            cfg.validate()?;
            cmd_galilei(&cfg, &times, &out)
        }
        Command::EvolveNls { epsilon, mu, t_end, dt0, record } => {
            if let Some(v) = epsilon {
                cfg.epsilon = v;
            }
            if let Some(v) = mu {
                cfg.mu = v;
            }
            if let Some(v) = t_end {
                cfg.t_end = v;
            }
            if let Some(v) = dt0 {
                cfg.dt0 = v;
            }
            if !record.is_empty() {
                cfg.record = record;
            }
            cfg.validate()?;
            cmd_evolve_nls(&cfg, &out)
        }
        Command::ExtractProfile { snapshots } => {
            let dir = snapshots.unwrap_or_else(|| out.clone());
            cmd_extract_profile(&cfg, &dir, &out)
        }
        Command::Verify => cmd_verify(&cfg, &out),
    }
}

/// `{:.16e}`: 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(path: &Path, cfg: &RunConfig, header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut s = String::new();
    writeln!(s, "# config_hash={}", cfg.hash()).unwrap();
    writeln!(s, "{header}").unwrap();
    for row in rows {
        let line: Vec<String> = row.into_iter().map(num).collect();
        writeln!(s, "{}", line.join(",")).unwrap();
    }
    fs::write(path, s)?;
    Ok(())
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    config_hash: String,
    #[serde(flatten)]
    body: &'a T,
}

fn write_json<T: Serialize>(path: &Path, cfg: &RunConfig, body: &T) -> Result<()> {
    let tagged = Tagged { config_hash: cfg.hash(), body };
    let text = serde_json::to_string_pretty(&tagged).map_err(|e| Error::Consistency(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

fn prepare(out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    Ok(())
}

fn cmd_scatter(cfg: &RunConfig, out: &Path) -> Result<i32> {
    prepare(out)?;
    let opts = cfg.jost();
    let xs = cfg.frequency_grid()?.positive_values();
    let rows: Vec<std::result::Result<Vec<f64>, (f64, String)>> = xs
        .par_iter()
        .map(|&xi| {
            scattering_coeffs(xi, cfg.x_max, &opts)
                .map(|c| {
                    vec![xi, c.t.re, c.t.im, c.r.re, c.r.im, c.unitarity_defect(), c.t0_estimate.re, c.t0_estimate.im]
                })
                .map_err(|e| (xi, e.to_string()))
        })
        .collect();
    let mut failures = 0;
    for (xi, e) in rows.iter().filter_map(|r| r.as_ref().err()) {
        eprintln!("xi = {xi}: {e}");
        failures += 1;
    }
    write_csv(
        &out.join("scatter.csv"),
        cfg,
        "xi,re_t,im_t,re_r,im_r,unitarity_defect,re_t0_estimate,im_t0_estimate",
        rows.into_iter().filter_map(|r| r.ok()),
    )?;
    Ok(if failures * 100 > xs.len() { 3 } else { 0 })
}

#[derive(Serialize)]
struct BasisSummary {
    xi: f64,
    t: [f64; 2],
    r: [f64; 2],
    eigen_residual: f64,
}

fn cmd_basis(cfg: &RunConfig, out: &Path) -> Result<i32> {
    prepare(out)?;
    let grid = cfg.spatial_grid()?;
    let opts = cfg.jost();
    let mut summary = Vec::new();
    for &xi in &cfg.basis_xi {
        let (values, coeffs) = eigenfunction(xi, &grid, &opts)?;
        let residual = eigen_residual(&values, xi, cfg.mode)?;
        write_csv(
            &out.join(format!("basis_xi_{xi}.csv")),
            cfg,
            "x,re_e,im_e",
            values.values.iter().enumerate().map(|(j, v)| vec![grid.x(j), v.re, v.im]),
        )?;
        summary.push(BasisSummary {
            xi,
            t: [coeffs.t.re, coeffs.t.im],
            r: [coeffs.r.re, coeffs.r.im],
            eigen_residual: residual,
        });
    }
    write_json(&out.join("basis.json"), cfg, &serde_json::json!({ "frequencies": summary }))?;
    Ok(0)
}

/// `e(x, xi) = T f_+(x, xi) / sqrt(2 pi)` on the whole grid.
fn eigenfunction(xi: f64, grid: &SpatialGrid, opts: &JostOptions) -> Result<(ComplexField, crate::jost::ScatteringCoeffs)> {
    let sol = integrate_jost_plus(xi, grid, opts)?;
    let coeffs = crate::jost::ScatteringCoeffs::from_jost(&sol)?;
    let scale = coeffs.t / (2.0 * std::f64::consts::PI).sqrt();
    Ok((sol.f().scale(scale), coeffs))
}

/// Max of `|-e'' + V e - xi^2 e| / max|e|` away from the ends.
fn eigen_residual(e: &ComplexField, xi: f64, mode: Mode) -> Result<f64> {
    let d2 = crate::core::derivative_x(&crate::core::derivative_x(e)?)?;
    let scale = crate::core::linf_norm(e).max(1e-300);
    let n = e.values.len();
    Ok((4..n - 4)
        .map(|j| {
            let x = e.grid.x(j);
            (-d2.values[j] + e.values[j] * (mode.potential(x) - xi * xi)).norm() / scale
        })
        .fold(0.0, f64::max))
}

fn wide_basis(cfg: &RunConfig) -> Result<DistortedBasis> {
    DistortedBasis::build(cfg.nls_grid()?, cfg.nls_frequency_grid()?, &cfg.nls_basis_options())
}

#[derive(Serialize)]
struct DecayRecord {
    data: String,
    gamma: f64,
    global_slope: f64,
    global_intercept: f64,
    local_slope: f64,
    local_intercept: f64,
}

fn cmd_evolve_linear(cfg: &RunConfig, times: &[f64], out: &Path) -> Result<i32> {
    prepare(out)?;
    let basis = wide_basis(cfg)?;
    let times = if times.is_empty() { cfg.fit_times() } else { times.to_vec() };
    let data = preset(&cfg.data, *basis.spatial_grid())?;
    let samples = sample_decay(&data, &basis, &times, cfg.gamma)?;
    write_csv(
        &out.join("evolve_linear.csv"),
        cfg,
        "t,global_sup,local_sup",
        (0..samples.times.len()).map(|i| vec![samples.times[i], samples.global_sup[i], samples.local_sup[i]]),
    )?;
    let g = samples.global_fit()?;
    let l = samples.local_fit()?;
    let record = DecayRecord {
        data: cfg.data.clone(),
        gamma: cfg.gamma,
        global_slope: g.slope,
        global_intercept: g.intercept,
        local_slope: l.slope,
        local_intercept: l.intercept,
    };
    write_json(&out.join("evolve_linear.json"), cfg, &record)?;
    Ok(0)
}

#[derive(Serialize)]
struct GalileiSeries {
    data: String,
    fields: Vec<GalileiReport>,
    /// Along the linear trajectory of the NLS data.
    cubic: Vec<CubicReport>,
}

fn cmd_galilei(cfg: &RunConfig, times: &[f64], out: &Path) -> Result<i32> {
    prepare(out)?;
    let basis = wide_basis(cfg)?;
    let f = preset(&cfg.data, *basis.spatial_grid())?;
    let data = cauchy_data(cfg.epsilon, *basis.spatial_grid());
    let mut fields = Vec::new();
    let mut cubic = Vec::new();
    for &t in times {
        fields.push(compare_fields(&f, t, &basis)?);
        if t >= 1.0 {
            cubic.push(cubic_ratio(&evolve_linear(&data, t, &basis)?, t, &basis)?);
        }
    }
    write_json(&out.join("galilei.json"), cfg, &GalileiSeries { data: cfg.data.clone(), fields, cubic })?;
    Ok(0)
}

#[derive(Serialize)]
struct Diagnostics {
    t: f64,
    mass: f64,
    a: f64,
    b: f64,
    cubic_ratio: f64,
    nullform_residual: f64,
}

fn snapshot_name(t: f64) -> String {
    format!("snapshot_t{t:011.6}.csv")
}

fn cmd_evolve_nls(cfg: &RunConfig, out: &Path) -> Result<i32> {
    prepare(out)?;
    let basis = wide_basis(cfg)?;
    let solver = cfg.solver();
    let grid = *basis.spatial_grid();
    let keep: Vec<usize> = (0..grid.n()).filter(|&j| grid.x(j).abs() <= cfg.snapshot_x_max).collect();
    let mut stream = String::new();
    let hash = cfg.hash();
    let run = evolve(&solver, &basis, |state| {
        let mut s = String::new();
        writeln!(s, "# config_hash={hash}").unwrap();
        writeln!(s, "# t={}", num(state.t)).unwrap();
        writeln!(s, "x,re_u,im_u").unwrap();
        for &j in &keep {
            let v = state.u.values[j];
            writeln!(s, "{},{},{}", num(grid.x(j)), num(v.re), num(v.im)).unwrap();
        }
        fs::write(out.join(snapshot_name(state.t)), s)?;
        let cubic = cubic_ratio(&state.u, state.t, &basis)?;
        let d = Diagnostics {
            t: state.t,
            mass: state.mass,
            a: state.t.sqrt() * crate::core::linf_norm(&state.u),
            b: cubic.w,
            cubic_ratio: cubic.ratio,
            nullform_residual: nullform_residual(&state.u, state.t, Derivative::Spectral)?,
        };
        let _ = writeln!(stream, "{}", serde_json::to_string(&d).map_err(|e| Error::Consistency(e.to_string()))?);
        Ok(())
    })?;
    fs::write(out.join("diagnostics.jsonl"), stream)?;
    write_json(&out.join("bootstrap.json"), cfg, &run.series)?;
    if let Some(reason) = &run.aborted {
        eprintln!("run stopped early: {reason}");
        return Ok(3);
    }
    Ok(0)
}

/// Read a snapshot written by `evolve-nls`.
pub fn read_snapshot(path: &Path) -> Result<(f64, ComplexField)> {
    let text = fs::read_to_string(path)?;
    let mut t = None;
    let mut xs = Vec::new();
    let mut vals = Vec::new();
    let bad = |what: &str| Error::Config(format!("{}: {what}", path.display()));
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# t=") {
            t = Some(rest.trim().parse::<f64>().map_err(|_| bad("bad time"))?);
            continue;
        }
        if line.starts_with('#') || line.starts_with('x') || line.is_empty() {
            continue;
        }
        let cols: Vec<f64> =
            line.split(',').map(|c| c.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad("bad number"))?;
        if cols.len() != 3 {
            return Err(bad("expected three columns"));
        }
        xs.push(cols[0]);
        vals.push(C64::new(cols[1], cols[2]));
    }
    let t = t.ok_or_else(|| bad("missing `# t=` line"))?;
    if xs.len() < 2 || (xs[0] + xs[xs.len() - 1]).abs() > 1e-9 * xs[xs.len() - 1].abs().max(1.0) {
        return Err(bad("snapshot grid must be symmetric"));
    }
    let grid = SpatialGrid::new(xs[xs.len() - 1], xs.len())?;
    Ok((t, ComplexField::new(grid, vals)?))
}

#[derive(Serialize)]
struct ProfileRecord {
    t_b: f64,
    cauchy_defect: f64,
    remainder_times: Vec<f64>,
    remainder_linf: Vec<f64>,
    remainder_l2: Vec<f64>,
    remainder_linf_slope: Option<f64>,
    remainder_l2_slope: Option<f64>,
    ode_residual_times: Vec<f64>,
    ode_residual_sup: Vec<f64>,
    ode_residual_exponent: Option<f64>,
}

fn cmd_extract_profile(cfg: &RunConfig, dir: &Path, out: &Path) -> Result<i32> {
    prepare(out)?;
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("snapshot_") && n.ends_with(".csv")))
        .collect();
    files.sort();
    if files.len() < 3 {
        return Err(Error::Config(format!("need at least three snapshot files in {}", dir.display())));
    }
    let chi = bump_chi();
    let mut series = ProfileSeries::new(cfg.velocity_grid()?);
    let mut snaps = Vec::new();
    for f in &files {
        let (t, u) = read_snapshot(f)?;
        series.push(&u, t, &chi)?;
        snaps.push((t, u));
    }
    let asym = extract_asymptotics(&series, cfg.mu)?;
    write_csv(
        &out.join("profile.csv"),
        cfg,
        "v,re_u_inf,im_u_inf,phi_inf",
        (0..asym.vgrid.count).filter_map(|i| {
            let u = asym.u_inf[i]?;
            Some(vec![asym.vgrid.v(i), u.re, u.im, asym.phi_inf[i]?])
        }),
    )?;
    let t_lo = asym.t_b / 8.0;
    let mut rt = Vec::new();
    let mut rinf = Vec::new();
    let mut r2 = Vec::new();
    for (t, u) in snaps.iter().filter(|(t, _)| *t >= t_lo - 1e-9) {
        let r = remainder(u, *t, &asym, cfg.mu)?;
        rt.push(*t);
        rinf.push(r.linf);
        r2.push(r.l2);
    }
    let ode = ode_residual(&series, cfg.mu)?;
    let record = ProfileRecord {
        t_b: asym.t_b,
        cauchy_defect: asym.cauchy_defect,
        remainder_linf_slope: crate::prop::log_log_fit(&rt, &rinf).ok().map(|f| f.0),
        remainder_l2_slope: crate::prop::log_log_fit(&rt, &r2).ok().map(|f| f.0),
        remainder_times: rt,
        remainder_linf: rinf,
        remainder_l2: r2,
        ode_residual_exponent: ode.decay_exponent(10.0, asym.t_b).ok(),
        ode_residual_times: ode.times,
        ode_residual_sup: ode.sup,
    };
    write_json(&out.join("profile.json"), cfg, &record)?;
    Ok(0)
}

#[derive(Serialize)]
struct VerifyReport {
    mode: Mode,
    all_passed: bool,
    criteria: Vec<CriterionResult>,
}

fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<i32> {
    prepare(out)?;
    let criteria = run_suite(cfg, |r| println!("{}", r.line()))?;
    let all_passed = criteria.iter().all(|r| r.passed);
    write_json(&out.join("verify.json"), cfg, &VerifyReport { mode: cfg.mode, all_passed, criteria })?;
    Ok(if all_passed { 0 } else { EXIT_ACCEPTANCE })
}
