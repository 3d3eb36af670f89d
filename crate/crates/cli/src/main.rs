use clap::Parser;

use causalrd_cli::error::EXIT_VALIDATION;
use causalrd_cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = run(&cli, &mut std::io::stdout().lock());
    std::process::exit(code);
}
