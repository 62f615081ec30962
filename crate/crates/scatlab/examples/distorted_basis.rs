//! Build the distorted Fourier basis on a small grid and check it:
//! Plancherel, round trip, and the eigenfunction residual of one column.

use scatlab::core::{FrequencyGrid, SpatialGrid};
use scatlab::dft::{plancherel_defect, round_trip_defect, BasisOptions, DistortedBasis};
use scatlab::prop::preset;

fn main() -> scatlab::Result<()> {
    let sgrid = SpatialGrid::new(40.0, 1601)?;
    let fgrid = FrequencyGrid::new(0.01, 10.0, 1000)?;
    let basis = DistortedBasis::build(sgrid, fgrid, &BasisOptions::default())?;

    for name in ["gaussian", "modulated", "odd"] {
        let f = preset(name, sgrid)?;
        println!(
            "{name:>9}: plancherel {:.2e}, round trip {:.2e}",
            plancherel_defect(&f, &basis)?,
            round_trip_defect(&f, &basis)?
        );
    }

    let k = fgrid.index_pos(300);
    let c = basis.coeffs(300);
    println!("xi = {:.4}: T = {:.6}, column residual {:.2e}", c.xi, c.t, basis.column_residual(k)?);

    // the spectrum of e^{-x^2} at a few frequencies
    let spec = basis.forward(&preset("gaussian", sgrid)?)?;
    for i in [0, 100, 400] {
        println!("  f~({:+.3}) = {:.6}", fgrid.positive(i), spec.values[fgrid.index_pos(i)]);
    }
    Ok(())
}
