//! `arcmarkov` command-line front end.
//!
//! Exit codes: 0 when every assertion of the run passes, 1 on an assertion
//! or computation failure, 2 on a configuration error. Errors are reported
//! as one JSON object on stderr.

mod args;
mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use arcmarkov::ineqlab::IneqError;
use arcmarkov::{CompositionError, EquilibriumError, FastDecayError, PolyError, TSetError};
use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Format};
use config::{expand_config, stamp_csv, stamp_json, ConfigError, ExperimentConfig};

const EXIT_ASSERTION: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => return report_error("config", &e.to_string(), &[], EXIT_CONFIG),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => report_error("config", e.to_string().trim(), &[], EXIT_CONFIG),
            }
        }
    };
    run(cli)
}

fn run(cli: Cli) -> ExitCode {
    let g = &cli.global;
    let format = g.format.unwrap_or_else(|| cli.command.default_format());
    let rep = match commands::execute(&cli.command, g.seed, &g.tol) {
        Ok(r) => r,
        Err(e) => {
            let (kind, code) = if is_config_error(&e) {
                ("config", EXIT_CONFIG)
            } else {
                ("computation", EXIT_ASSERTION)
            };
            return report_error(kind, &format!("{e:#}"), &[], code);
        }
    };
    let cfg = ExperimentConfig::new(&cli.command, g.seed, format, g.tol, rep.inputs);
    let hash = cfg.hash();
    let body = match format {
        Format::Csv => stamp_csv(&rep.csv, &hash, g.seed),
        Format::Json => stamp_json(rep.json, &cfg, &hash),
    };
    let written = match &g.output {
        Some(path) => std::fs::write(path, &body).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(body.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}")),
    };
    if let Err(msg) = written {
        return report_error("config", &msg, &[], EXIT_CONFIG);
    }
    if rep.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        report_error("assertion", "assertions failed", &rep.failures, EXIT_ASSERTION)
    }
}

fn report_error(kind: &str, message: &str, failures: &[String], code: u8) -> ExitCode {
    let doc = json!({ "error": kind, "message": message, "failures": failures });
    eprintln!("{doc}");
    ExitCode::from(code)
}

/// Whether `e` stems from bad input rather than a failed computation.
fn is_config_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<ConfigError>()
            || c.downcast_ref::<PolyError>().is_some()
            || c.downcast_ref::<EquilibriumError>().is_some_and(eq_input)
            || c.downcast_ref::<TSetError>().is_some_and(tset_input)
            || c.downcast_ref::<FastDecayError>().is_some_and(fd_input)
            || c.downcast_ref::<CompositionError>().is_some_and(comp_input)
            || c.downcast_ref::<IneqError>().is_some_and(ineq_input)
    })
}

fn eq_input(e: &EquilibriumError) -> bool {
    !matches!(e, EquilibriumError::NoConvergence { .. })
}

fn tset_input(e: &TSetError) -> bool {
    match e {
        TSetError::NotAdmissible(_) => true,
        TSetError::Equilibrium(e) => eq_input(e),
        TSetError::Composition(e) => comp_input(e),
        TSetError::OutOfRange(_) => false,
    }
}

fn fd_input(e: &FastDecayError) -> bool {
    matches!(e, FastDecayError::InvalidSpec(_))
}

fn comp_input(e: &CompositionError) -> bool {
    !matches!(e, CompositionError::Overflow)
}

fn ineq_input(e: &IneqError) -> bool {
    match e {
        IneqError::IntervalConditionViolated { .. } | IneqError::NotInterior(..) | IneqError::InvalidInput(_) => true,
        IneqError::ZeroPolynomial => false,
        IneqError::Equilibrium(e) => eq_input(e),
        IneqError::TSet(e) => tset_input(e),
        IneqError::FastDecay(e) => fd_input(e),
        IneqError::Composition(e) => comp_input(e),
    }
}
