//! Compare the free Galilei field `x + 2it d/dx` with its distorted version
//! along the linear flow, and check the cubic product rule. The grid must keep
//! `t = 100` inside its truncation horizon.

use scatlab::core::{FrequencyGrid, SpatialGrid};
use scatlab::dft::{BasisOptions, DistortedBasis};
use scatlab::galilei::{compare_fields, cubic_ratio, nullform_residual, Derivative};
use scatlab::nls::cauchy_data;
use scatlab::prop::evolve_linear;

fn main() -> scatlab::Result<()> {
    let sgrid = SpatialGrid::with_spacing(0.125, 1 << 15)?;
    let fgrid = FrequencyGrid::fourier_dual(&sgrid, sgrid.fourier_spacing(), 8.0)?;
    let basis = DistortedBasis::build(sgrid, fgrid, &BasisOptions::default().with_core(20.0))?;
    let data = cauchy_data(0.05, sgrid);

    for t in [1.0, 10.0, 100.0] {
        let u = evolve_linear(&data, t, &basis)?;
        let g = compare_fields(&u, t, &basis)?;
        let c = cubic_ratio(&u, t, &basis)?;
        let n = nullform_residual(&u, t, Derivative::Spectral)?;
        println!(
            "t = {t:5}: |J0 u| = {:.4e}, |JV u| = {:.4e}, ratio {:.3}, cubic {:.3e}, product rule {:.1e}",
            g.norm_j0, g.norm_jv, g.comparison_ratio, c.ratio, n
        );
    }
    Ok(())
}
