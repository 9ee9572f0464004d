//! Runs every acceptance criterion and prints one PASS/FAIL line for each.
//! Criterion 10 drives the built binary over the fixture directory.

use std::path::Path;
use std::process::ExitCode;

fn main() -> ExitCode {
    let exe = Path::new(env!("CARGO_BIN_EXE_phylonet"));
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let outcomes = phylonet_cli::selftest::run(&[], exe, &fixtures, |o| {
        println!("{} [{:.1}s]", o.line(), o.elapsed.as_secs_f64());
    });
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
