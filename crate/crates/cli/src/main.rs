use std::process::ExitCode;

fn main() -> ExitCode {
    qcrb_cli::main_with(std::env::args_os())
}
