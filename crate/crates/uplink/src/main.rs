use std::process::ExitCode;

use uplink::cli::{execute, parse_args};
use uplink::CliError;

fn main() -> ExitCode {
    match parse_args(std::env::args_os()).and_then(|cli| execute(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Help(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code())
        }
    }
}
