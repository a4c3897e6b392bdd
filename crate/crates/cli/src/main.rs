use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use layermodes::{exit_code, run, Command, RunConfig};

/// Natural-mode frequencies of stratified media.
#[derive(Debug, Parser)]
#[command(name = "layermodes", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: `output_dir` from the configuration, else `.`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the contour jitter (overrides the configuration).
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = RunConfig::load(&args.config).and_then(|cfg| {
        let out = args.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&out)?;
        run(args.command, &cfg, &out, args.seed)
    });
    match &result {
        Ok(o) => {
            for f in &o.files {
                println!("{}", f.display());
            }
            if o.status != layermodes::Status::Ok {
                eprintln!("warning: the search left unresolved cells; partial results written");
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
