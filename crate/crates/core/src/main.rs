use std::process::ExitCode;

fn main() -> ExitCode {
    contact_bethe::cli::run(std::env::args_os())
}
