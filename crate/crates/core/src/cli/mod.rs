//! Command-line front end: configuration, subcommands and report emission.

mod args;
mod commands;
mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::Parser;

pub use args::{Args, Command};
pub use commands::{
    cmd_ckn_check, cmd_exponents, cmd_fundamental, cmd_liouville, cmd_poisson, cmd_sweep,
    cmd_sweep_with_threads, cmd_verify_identity, threads_from_env, Outcome, Report, SweepRow,
    CKN_RATIO_FLOOR, IDENTITY_TOLERANCE, THREADS_ENV,
};
pub use config::{Format, Grid, Overrides, RunConfig, SourceConfig, TestFunctionKind};

use crate::error::{CknError, Result};
use crate::output::to_canonical_json;

pub fn run_command(command: Command, config: &RunConfig) -> Result<Outcome> {
    match command {
        Command::Exponents => cmd_exponents(config),
        Command::Fundamental => cmd_fundamental(config),
        Command::VerifyIdentity => cmd_verify_identity(config),
        Command::CknCheck => cmd_ckn_check(config),
        Command::Poisson => cmd_poisson(config),
        Command::Liouville => cmd_liouville(config),
        Command::Sweep => cmd_sweep(config),
    }
}

/// Writes `<command>.json` / `<command>.csv` into `output_dir`, or prints to
/// stdout: the CSV when it is the only format requested, the JSON otherwise.
pub fn emit(outcome: &Outcome, config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let json = to_canonical_json(&outcome.report)?;
    match &config.output_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let write = |ext: &str, text: &str| -> Result<()> {
                let path = Path::new(dir).join(format!("{}.{ext}", outcome.report.command));
                fs::write(&path, text).map_err(|e| CknError::Io(format!("{}: {e}", path.display())))
            };
            if config.wants(Format::Json) {
                write("json", &json)?;
            }
            if let (true, Some(csv)) = (config.wants(Format::Csv), &outcome.csv) {
                write("csv", csv)?;
            }
        }
        None => {
            let only_csv = config.formats == [Format::Csv];
            match (&outcome.csv, only_csv) {
                (Some(csv), true) => stdout.write_all(csv.as_bytes())?,
                _ => stdout.write_all(json.as_bytes())?,
            }
        }
    }
    Ok(())
}

/// Parses arguments, runs one subcommand and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = args.config().and_then(|config| {
        let outcome = run_command(args.command, &config)?;
        emit(&outcome, &config, &mut std::io::stdout().lock())?;
        Ok(outcome.exit_code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
