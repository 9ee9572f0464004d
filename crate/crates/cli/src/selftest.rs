use std::path::Path;
use std::time::Instant;

use phylonet::acceptance::{self, Outcome};

/// Runs the determinism criterion against the binary at `exe`.
pub fn determinism(exe: &Path, fixtures: &Path) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = match crate::determinism::check(exe, fixtures) {
        Ok(n) => (true, format!("{n} commands give identical output with 1 and 4 threads")),
        Err(why) => (false, why),
    };
    Outcome { id: 10, title: acceptance::title(10), passed, detail, elapsed: start.elapsed() }
}

/// Runs the chosen criteria (all when empty) in order, calling `report`
/// after each one.
pub fn run(ids: &[u8], exe: &Path, fixtures: &Path, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    let ids: Vec<u8> = if ids.is_empty() { (1..=10).collect() } else { ids.to_vec() };
    ids.iter()
        .map(|&id| {
            let o = if id == 10 { determinism(exe, fixtures) } else { acceptance::run(id) };
            report(&o);
            o
        })
        .collect()
}
