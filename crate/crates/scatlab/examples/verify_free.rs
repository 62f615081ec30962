//! The acceptance criteria that apply without the potential. The full suite
//! on the default configuration is `scatlab verify` (about ten minutes).

use scatlab::config::RunConfig;
use scatlab::jost::Mode;
use scatlab::verify::{run_suite, suite_ok};

fn main() -> scatlab::Result<()> {
    let cfg = RunConfig { mode: Mode::Free, ..RunConfig::default() };
    let results = run_suite(&cfg, |r| println!("{}", r.line()))?;
    println!("suite ok: {}", suite_ok(&results));
    Ok(())
}
