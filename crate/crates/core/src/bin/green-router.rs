use std::process::ExitCode;

fn main() -> ExitCode {
    green_router::harness::cli::run(std::env::args_os())
}
