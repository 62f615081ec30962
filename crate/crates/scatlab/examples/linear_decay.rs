//! Dispersive decay of the linear flow. The wide periodic grid keeps the
//! truncation horizon beyond t = 100.

use scatlab::core::{FrequencyGrid, SpatialGrid};
use scatlab::dft::{BasisOptions, DistortedBasis};
use scatlab::prop::{preset, sample_decay, truncation_horizon};

fn main() -> scatlab::Result<()> {
    let sgrid = SpatialGrid::with_spacing(0.125, 1 << 15)?;
    let fgrid = FrequencyGrid::fourier_dual(&sgrid, sgrid.fourier_spacing(), 8.0)?;
    let basis = DistortedBasis::build(sgrid, fgrid, &BasisOptions::default().with_core(20.0))?;
    println!("truncation horizon t = {:.1}", truncation_horizon(&basis));

    let f = preset("gaussian", sgrid)?;
    let times = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 100.0];
    let samples = sample_decay(&f, &basis, &times, 0.75)?;
    for ((t, g), l) in times.iter().zip(&samples.global_sup).zip(&samples.local_sup) {
        println!("t = {t:8.2}   sup |u| = {g:.4e}   sup over |x| < t^0.75 = {l:.4e}");
    }
    // global decay t^{-1/2}; locally faster since T(0) = 0
    println!("global slope {:.3}", samples.global_fit()?.slope);
    println!("local slope  {:.3}", samples.local_fit()?.restricted(10.0, 100.0)?.slope);
    Ok(())
}
