use std::process::ExitCode;

fn main() -> ExitCode {
    wprelay::cli::run()
}
