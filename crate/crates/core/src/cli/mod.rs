//! Command-line front end: verification suite, Bell scans, coincidence tables,
//! trajectory ensembles and curvature maps.

mod commands;
mod config;
mod meta;
mod verify;

use std::process::ExitCode;

use clap::Parser;

pub use config::{Args, Command, FileConfig, Format, RunConfig, Slice, StateKind};
pub use meta::Metadata;
pub use verify::{run_suite, Check, VerifyReport};

use crate::error::Error;

/// Stable process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Exit {
    Ok = 0,
    CheckFailure = 1,
    Usage = 2,
    Numeric = 3,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::Usage,
            message: message.into(),
        }
    }

    pub fn check(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::CheckFailure,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::InvalidArgument(_) | Error::Domain(_) => Exit::Usage,
            Error::Config(_) | Error::Io(_) | Error::Json(_) | Error::ContractViolation(_) => Exit::CheckFailure,
            _ => Exit::Numeric,
        };
        Self {
            exit,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

/// Runs a resolved configuration; the returned code is the process exit status.
pub fn execute(config: &RunConfig) -> Result<Exit, Failure> {
    std::fs::create_dir_all(&config.out)?;
    match config.command {
        Command::Verify => commands::verify(config),
        Command::BellScan => commands::bell_scan(config),
        Command::Trajectories => commands::trajectories(config),
        Command::CurvatureMap => commands::curvature_map(config),
        Command::Coincidence => commands::coincidence(config),
    }
}

/// Parses `std::env::args`, runs the command and reports failures on stderr.
pub fn main_entry() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Exit::Usage.into() } else { Exit::Ok.into() };
        }
    };
    let config = match RunConfig::resolve(&args) {
        Ok(c) => c,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.exit.into();
        }
    };
    match execute(&config) {
        Ok(code) => code.into(),
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.exit.into()
        }
    }
}
