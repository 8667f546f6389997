use std::process::ExitCode;

fn main() -> ExitCode {
    let quiet = std::env::args().any(|a| a == "--quiet");
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if quiet {
        "error"
    } else {
        "warn"
    }))
    .init();
    let status = eebandit::harness::cli::cli_main(std::env::args_os());
    ExitCode::from(status.clamp(0, 255) as u8)
}
