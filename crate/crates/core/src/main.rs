use std::process::ExitCode;

fn main() -> ExitCode {
    compact_fourier::cli::run(std::env::args_os())
}
