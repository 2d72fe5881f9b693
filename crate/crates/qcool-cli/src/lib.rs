//! Command-line front end for the `qcool` simulations: grid sweeps of a
//! single protocol, multi-method comparisons, and a self-test battery.
//!
//! The binary is a thin shell around [`run_cli`]; everything else lives in
//! library modules so the integration tests can exercise parsing,
//! serialization, and chart emission without spawning processes.

pub mod rows;
pub mod run;
pub mod spec;
pub mod svg;
pub mod verify;

use clap::Parser;
use std::ffi::OsString;

/// Everything that can sink a command, ordered by severity of the exit code
/// it maps to. Spec problems are reported before any computation starts;
/// invariant failures abort before a single bad row is serialized.
#[derive(Debug)]
pub enum Failure {
    /// A computed row violated its field-range invariants, a protocol call
    /// failed mid-grid, or a hard verify check failed. Exit 1.
    Invariant(String),
    /// The merged flag/config spec is unusable. Exit 2.
    Spec(String),
    /// Filesystem trouble reading a config or writing results. Exit 3.
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Invariant(_) => 1,
            Failure::Spec(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Invariant(m) | Failure::Spec(m) | Failure::Io(m) => m,
        }
    }
}

/// Parse `args`, dispatch, and return the process exit code. Clap usage
/// errors print to stderr and come back as 2; `--help`/`--version` print to
/// stdout and come back as 0.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match spec::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };

    let result = match cli.command {
        spec::Command::Sweep(args) => spec::resolve_sweep(&args)
            .and_then(|(protocol, sweep)| run::cmd_sweep(protocol, &sweep)),
        spec::Command::Compare(args) => spec::resolve_compare(&args)
            .and_then(|(style, sweep)| run::cmd_compare(style, &sweep)),
        spec::Command::Verify(args) => verify::cmd_verify(args.corrupt_pauli),
    };

    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}
