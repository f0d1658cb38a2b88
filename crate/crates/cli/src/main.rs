mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::Config;
use error::CliResult;

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    if let Some(n) = cli.threads.or(cfg.threads) {
        // fails only if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Solve(a) => commands::solve(a, &cfg),
        Command::Measure(a) => commands::measure_cmd(a, &cfg),
        Command::Model(a) => commands::model(a),
        Command::Pipeline(a) => commands::pipeline_cmd(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("deloc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
