use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use elgi_cli::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // clap renders usage hints over several lines; keep the first
            let rendered = e.render().to_string();
            let first = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("error: invalid arguments");
            if first.starts_with("error:") {
                eprintln!("{first}");
            } else {
                eprintln!("error: missing or invalid command, see `elgi --help`");
            }
            return ExitCode::from(2);
        }
    };
    match elgi_cli::execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
