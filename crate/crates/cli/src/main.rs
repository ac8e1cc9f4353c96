use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(kbiframe_cli::run(std::env::args_os()) as u8)
}
