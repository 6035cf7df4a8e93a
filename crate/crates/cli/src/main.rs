use clap::Parser;

fn main() {
    let cli = stadf_cli::Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = stadf_cli::run(cli) {
        eprintln!("stadf: {e}");
        std::process::exit(e.exit_code());
    }
}
