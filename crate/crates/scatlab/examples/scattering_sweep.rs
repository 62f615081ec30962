//! Transmission and reflection coefficients across frequencies, with the
//! unitarity defect `|T|^2 + |R|^2 - 1` and the reflectionless free mode.

use scatlab::core::log_space;
use scatlab::jost::{scattering_coeffs, JostOptions, Mode};

fn main() -> scatlab::Result<()> {
    let opts = JostOptions::default();
    println!("{:>8} {:>24} {:>24} {:>10}", "xi", "T", "R", "defect");
    for xi in log_space(0.05, 8.0, 9) {
        let c = scattering_coeffs(xi, 400.0, &opts)?;
        println!("{xi:8.4} {:>24.6} {:>24.6} {:10.2e}", c.t, c.r, c.unitarity_defect());
    }

    // small frequencies: T vanishes like xi^3
    let c = scattering_coeffs(0.02, 400.0, &opts)?;
    println!("T / xi^3 at xi = 0.02: {:.5}", c.t0_estimate);

    let free = JostOptions { mode: Mode::Free, ..opts };
    let c = scattering_coeffs(1.0, 400.0, &free)?;
    println!("free mode at xi = 1: T = {}, R = {}", c.t, c.r);
    Ok(())
}
