use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use cpx_cli::{exit, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(exit::USAGE as u8),
            };
        }
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit::USAGE as u8);
        }
    };
    let _ = std::io::stdout().write_all(report.render(cli.output_format()).as_bytes());
    let code = if !report.all_passed() {
        exit::VERIFICATION_FAILED
    } else if !report.all_valid() {
        exit::INVALID
    } else {
        exit::OK
    };
    ExitCode::from(code as u8)
}
