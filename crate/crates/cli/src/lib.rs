// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

//! Library half of the `qibound` binary: configuration, dispatch and
//! report emission.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;

use clap::Parser;
use qibound_core::{Error, ErrorClass};
use serde::Serialize;

use config::{Cli, Command, FileConfig, Plan};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_ACCURACY: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Validation => EXIT_VALIDATION,
        ErrorClass::Accuracy => EXIT_ACCURACY,
        ErrorClass::Violation => EXIT_VIOLATION,
    }
}

/// The structured form of an error, written to stderr as one JSON line.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: String,
    pub class: &'static str,
    pub exit_code: i32,
    pub subcommand: Option<&'static str>,
    pub seed: Option<u64>,
}

impl ErrorRecord {
    pub fn new(e: &Error, plan: Option<&Plan>) -> Self {
        ErrorRecord {
            error: e.to_string(),
            class: match (e, e.class()) {
                (Error::Io(_), _) => "io",
                (_, ErrorClass::Validation) => "validation",
                (_, ErrorClass::Accuracy) => "accuracy",
                (_, ErrorClass::Violation) => "violation",
            },
            exit_code: exit_code(e),
            subcommand: plan.map(|p| p.command.label()),
            seed: plan.map(|p| p.seed),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).unwrap_or_else(|_| format!("{{\"error\":{:?}}}", self.error))
    }
}

/// Caps the global worker pool from `QIBOUND_THREADS`.
fn configure_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("QIBOUND_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "QIBOUND_THREADS must be a positive integer, got '{v}'"
        ))
    })?;
    // A second initialization in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Parses arguments, runs, emits, and returns the process exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            let err = Error::InvalidParameter(e.to_string().trim().to_string());
            eprintln!("{}", ErrorRecord::new(&err, None).to_line());
            return EXIT_VALIDATION;
        }
    };
    let fail = |e: &Error, plan: Option<&Plan>| {
        eprintln!("{}", ErrorRecord::new(e, plan).to_line());
        exit_code(e)
    };
    if let Err(e) = configure_threads() {
        return fail(&e, None);
    }
    let file = match &cli.flags.config {
        Some(p) => match FileConfig::load(p) {
            Ok(f) => f,
            Err(e) => return fail(&e, None),
        },
        None => FileConfig::default(),
    };
    let command: Command = cli.command.into();
    if let Some(c) = file.subcommand {
        if c != command {
            let e = Error::InvalidParameter(format!(
                "config is for '{}' but '{}' was requested",
                c.label(),
                command.label()
            ));
            return fail(&e, None);
        }
    }
    let plan = match Plan::resolve(command, file, &cli.flags) {
        Ok(p) => p,
        Err(e) => return fail(&e, None),
    };
    let outcome = match commands::run(&plan) {
        Ok(o) => o,
        Err(e) => return fail(&e, Some(&plan)),
    };
    if let Err(e) = outcome.report.emit(plan.format, plan.out.as_deref()) {
        return fail(&e, Some(&plan));
    }
    match outcome.failure {
        Some(e) => fail(&e, Some(&plan)),
        None => EXIT_OK,
    }
}
