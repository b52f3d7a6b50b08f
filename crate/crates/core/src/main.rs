use std::process::ExitCode;

fn main() -> ExitCode {
    multichain::cli::run(std::env::args_os())
}
