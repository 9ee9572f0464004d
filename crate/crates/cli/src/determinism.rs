use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

/// Fixture files used by the determinism check, by file name.
pub const FIXTURES: [(&str, &str); 6] = [
    ("fig1.nwk", include_str!("../tests/fixtures/fig1.nwk")),
    ("fig1_rooted.nwk", include_str!("../tests/fixtures/fig1_rooted.nwk")),
    ("fig6N.txt", include_str!("../tests/fixtures/fig6N.txt")),
    ("fig6T.nwk", include_str!("../tests/fixtures/fig6T.nwk")),
    ("ndp.txt", include_str!("../tests/fixtures/ndp.txt")),
    ("three.nwk", include_str!("../tests/fixtures/three.nwk")),
];

/// Argument lists covering every subcommand; `{}` stands for the fixture
/// directory.
pub const COMMANDS: &[&str] = &[
    "utc --network {}/fig6N.txt --tree {}/fig6T.nwk",
    "utc --network {}/fig6N.txt --tree {}/fig6T.nwk --no-kernel --format dot",
    "utc --network {}/fig6N.txt --tree {}/fig6T.nwk --format log",
    "uhn --trees {}/fig1.nwk",
    "hn --trees {}/fig1_rooted.nwk --kmax 3",
    "ruhn --trees {}/fig1.nwk --kmax 3",
    "kernelize --network {}/fig6N.txt --tree {}/fig6T.nwk",
    "kernelize --trees {}/fig1.nwk --k 2",
    "oracle utc --network {}/fig6N.txt --tree {}/fig6T.nwk",
    "oracle tbr --trees {}/fig1.nwk",
    "oracle uhn --trees {}/fig1.nwk --kmax 2",
    "oracle ndp --instance {}/ndp.txt",
    "gen-ndp --nodes 8 --pairs 3 --seed 11 --gadget",
    "gen-lemma4 --trees {}/three.nwk",
    "export-dot --input {}/fig6N.txt",
    "selftest --criterion 2",
];

/// Writes the embedded fixtures to a fresh directory under the system
/// temporary directory.
pub fn write_fixtures() -> std::io::Result<PathBuf> {
    let dir = std::env::temp_dir().join(format!("phylonet-fixtures-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    for (name, text) in FIXTURES {
        fs::write(dir.join(name), text)?;
    }
    Ok(dir)
}

fn run(exe: &Path, args: &[String], threads: u16) -> Result<(Option<i32>, Vec<u8>), String> {
    let out = Command::new(exe)
        .args(args)
        .arg("--threads")
        .arg(threads.to_string())
        .output()
        .map_err(|e| format!("cannot run {}: {e}", exe.display()))?;
    Ok((out.status.code(), out.stdout))
}

/// Runs every command with 1 and with 4 threads and compares exit codes and
/// standard output byte for byte. Returns the number of commands compared.
pub fn check(exe: &Path, fixtures: &Path) -> Result<usize, String> {
    let dir = fixtures.to_str().ok_or("fixture path is not UTF-8")?;
    for cmd in COMMANDS {
        let args: Vec<String> = cmd.replace("{}", dir).split_whitespace().map(String::from).collect();
        let (code1, out1) = run(exe, &args, 1)?;
        let (code4, out4) = run(exe, &args, 4)?;
        if code1 != code4 || out1 != out4 {
            return Err(format!("`{cmd}` differs between 1 and 4 threads"));
        }
        if !matches!(code1, Some(0 | 1)) {
            return Err(format!("`{cmd}` exited with {code1:?}"));
        }
    }
    Ok(COMMANDS.len())
}
