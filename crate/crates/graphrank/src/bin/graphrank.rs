use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(graphrank::cli::run() as u8)
}
