fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(curved_duality::cli::run(std::env::args_os()))
}
