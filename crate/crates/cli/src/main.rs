use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use phylonet_cli::args::{Cli, Command};
use phylonet_cli::{commands, determinism, selftest};

const GUARD: u8 = 3;
const USAGE: u8 = 2;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<phylonet::Error>() {
        Some(phylonet::Error::Guard { .. }) => GUARD,
        _ => USAGE,
    }
}

fn selftest(ids: &[u8]) -> anyhow::Result<bool> {
    let exe = std::env::current_exe()?;
    let dir = determinism::write_fixtures()?;
    let outcomes = selftest::run(ids, &exe, &dir, |o| {
        println!("{}", o.line());
        eprintln!("criterion {} took {:.1}s", o.id, o.elapsed.as_secs_f64());
    });
    let _ = std::fs::remove_dir_all(&dir);
    Ok(outcomes.iter().all(|o| o.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.into()).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    }
    let result = match &cli.command {
        Command::Selftest { criterion } => selftest(criterion).map(|ok| (String::new(), ok)),
        command => commands::run(command, cli.format, &cli.guards.limits()).map(|r| (r.text, r.yes)),
    };
    match result {
        Ok((text, yes)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(USAGE);
            }
            ExitCode::from(if yes { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
