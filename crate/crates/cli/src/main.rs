use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    match chartex_cli::Cli::try_parse() {
        Ok(cli) => ExitCode::from(chartex_cli::run(cli)),
        Err(e) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() {
                chartex_cli::EXIT_ERROR
            } else {
                chartex_cli::EXIT_OK
            })
        }
    }
}
