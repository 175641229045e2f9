use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use isochain_cli::{parse_config, run, CliError};

/// Inverse spectral design of tight-binding chains and bent waveguides.
#[derive(Parser)]
#[command(name = "isochain", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 1 makes every output bitwise reproducible.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn execute(args: &Args) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let text = std::fs::read_to_string(&args.config)
        .map_err(|source| CliError::Io { path: args.config.display().to_string(), source })?;
    let base = args.config.parent().map(PathBuf::from).unwrap_or_default();
    let mut config = parse_config(&text, &base)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let artifacts = run(&config, &args.out)?;
    for f in artifacts.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
