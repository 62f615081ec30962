//! Cubic NLS with the potential from small Gaussian data, tracking mass and
//! the bootstrap quantities `A = t^{1/2} sup|u|` and `|J_V u|`. Small
//! high-frequency components travel at speeds near 40, so the periodic grid
//! needs `x_max` of about `40 t_end`.

use scatlab::core::{FrequencyGrid, SpatialGrid};
use scatlab::dft::{BasisOptions, DistortedBasis};
use scatlab::nls::{default_record_times, evolve, SolverConfig};

fn main() -> scatlab::Result<()> {
    let sgrid = SpatialGrid::with_spacing(0.125, 1 << 16)?;
    let fgrid = FrequencyGrid::fourier_dual(&sgrid, sgrid.fourier_spacing(), 8.0)?;
    let basis = DistortedBasis::build(sgrid, fgrid, &BasisOptions::default().with_core(20.0))?;

    let t_end = 50.0;
    let config = SolverConfig { t_end, record_times: default_record_times(t_end), ..Default::default() };
    let run = evolve(&config, &basis, |s| {
        println!("t = {:8.3}  mass = {:.12e}", s.t, s.mass);
        Ok(())
    })?;
    if let Some(why) = &run.aborted {
        println!("stopped early: {why}");
    }
    let s = &run.series;
    println!("{} steps, mass drift {:.2e}", run.steps, s.mass_drift());
    println!("A(t_end) = {:.4e}, A(1) = {:.4e}", s.a_sup(), s.a_vals[0]);
    println!("|J_V u| growth exponent on [1, {t_end}]: {:.2e}", s.jv_slope(1.0, t_end)?);
    Ok(())
}
