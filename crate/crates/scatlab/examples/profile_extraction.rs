//! Wave-packet profiles of an NLS run: the scattering profile at the final
//! time, its Cauchy defects, and the remainder after the modified ansatz.

use scatlab::core::{FrequencyGrid, SpatialGrid};
use scatlab::dft::{BasisOptions, DistortedBasis};
use scatlab::nls::{default_record_times, evolve, SolverConfig};
use scatlab::scatter::{
    bump_chi, cauchy_defects, extract_asymptotics, ode_residual, remainder, ProfileSeries, VelocityGrid,
};

fn main() -> scatlab::Result<()> {
    let sgrid = SpatialGrid::with_spacing(0.125, 1 << 17)?;
    let fgrid = FrequencyGrid::fourier_dual(&sgrid, sgrid.fourier_spacing(), 8.0)?;
    let basis = DistortedBasis::build(sgrid, fgrid, &BasisOptions::default().with_core(20.0))?;

    let t_end = 100.0;
    let config = SolverConfig { t_end, record_times: default_record_times(t_end), ..Default::default() };
    let chi = bump_chi();
    let mut profiles = ProfileSeries::new(VelocityGrid::new(6.0, 241)?);
    let mut last = None;
    evolve(&config, &basis, |s| {
        profiles.push(&s.u, s.t, &chi)?;
        last = Some(s.clone());
        Ok(())
    })?;

    let asym = extract_asymptotics(&profiles, config.mu)?;
    println!("profile at t_b = {}: Cauchy defect {:.3e}", asym.t_b, asym.cauchy_defect);
    for i in (0..asym.vgrid.count).step_by(40) {
        if let Some(u) = asym.u_inf[i] {
            println!("  v = {:+.2}: u_inf = {:.5}", asym.vgrid.v(i), u);
        }
    }
    for (t, d) in cauchy_defects(&profiles, config.mu, t_end / 8.0)? {
        println!("Cauchy defect at t = {t:6.2}: {d:.3e}");
    }
    let state = last.expect("at least one record");
    let r = remainder(&state.u, state.t, &asym, config.mu)?;
    println!("remainder at t = {}: sup {:.3e}, L2 {:.3e}", r.t, r.linf, r.l2);
    let ode = ode_residual(&profiles, config.mu)?;
    println!("profile ODE residual exponent on [10, {t_end}]: {:.3}", ode.decay_exponent(10.0, t_end)?);
    Ok(())
}
