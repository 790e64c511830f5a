use std::panic;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CYCAP_LOG", "warn")).init();
    let stdout = std::io::stdout();
    let code = panic::catch_unwind(|| cycap::cli::run(std::env::args_os(), &mut stdout.lock()))
        .unwrap_or(1);
    std::process::exit(code);
}
