//! Full acceptance suite on the default configuration. Takes about ten
//! minutes in release mode.

use std::process::ExitCode;

use scatlab::config::RunConfig;
use scatlab::verify::{run_suite, suite_ok};

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let results = match run_suite(&cfg, |r| println!("{}", r.line())) {
        Ok(r) => r,
        Err(e) => {
            println!("acceptance suite aborted: {e}");
            return ExitCode::FAILURE;
        }
    };
    let ids: Vec<u8> = results.iter().map(|r| r.id).collect();
    if ids != (1..=12).collect::<Vec<u8>>() {
        println!("expected criteria 1..=12, got {ids:?}");
        return ExitCode::FAILURE;
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/12 criteria pass");
    if suite_ok(&results) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
