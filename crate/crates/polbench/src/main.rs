use std::process::ExitCode;

fn main() -> ExitCode {
    polbench::cli::run()
}
