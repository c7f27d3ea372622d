use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = radig::cli::run(radig::cli::Cli::parse()) {
        eprintln!("radig: {e}");
        std::process::exit(e.exit_code());
    }
}
