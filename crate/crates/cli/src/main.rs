//! `japar`: fit, simulate and validate Jiles-Atherton models from the
//! command line. Every run emits one JSON report; exit codes are 0 on
//! success, 2 for input or usage errors and 3 for numerical failures.

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use report::{Failure, RunReport, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT as u8),
            };
        }
    };
    let common = cli.command.common().clone();
    let mut report = RunReport::new(cli.command.name());

    if let Err(failed) = commands::run(&cli.command, &mut report) {
        eprintln!("japar {}: {} failed: {:#}", report.command, failed.stage, failed.error);
        report.exit_status = failed.code;
        report.error = Some(Failure {
            stage: failed.stage,
            message: format!("{:#}", failed.error),
        });
    }
    if !common.deterministic {
        report.generated_at = Some(commands::timestamp());
    }

    let json = report.to_json();
    match &common.out {
        Some(path) => {
            if let Err(e) = report::write_text(path, &json) {
                eprintln!("japar {}: {e:#}", report.command);
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
        None => print!("{json}"),
    }
    ExitCode::from(report.exit_status as u8)
}
