//! Command-line front end: argument types, subcommand implementations and
//! the self-test runner.

pub mod args;
pub mod commands;
pub mod determinism;
pub mod selftest;
