mod args;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::{parse_strategy, Cli, Command};
use commands::Outcome;

const EXIT_FAILURE: u8 = 2;
const EXIT_FLAGGED: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Engine(faircrop_core::Error),
    Other(String),
}

impl From<faircrop_core::Error> for Failure {
    fn from(e: faircrop_core::Error) -> Self {
        Failure::Engine(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Other(m) => f.write_str(m),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Failure::Engine(e) => write!(f, "{e}"),
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let filter = tracing_subscriber::EnvFilter::try_from_default_env()
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(level));
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .init();
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Other(e.to_string()))?;
    }
    match &cli.command {
        Command::Saliency { image, out, heatmap } => commands::saliency(g, image, out, heatmap.as_deref()),
        Command::Crop {
            image,
            ars,
            strategy,
            out_dir,
        } => {
            let strategy = parse_strategy(strategy, g.seed()).map_err(Failure::Usage)?;
            commands::crop(g, image, ars, &strategy, out_dir)
        }
        Command::Audit(a) => commands::audit(g, a),
        Command::Regions { image, threshold, out } => commands::regions(g, image, *threshold, out.as_deref()),
        Command::Stats {
            manifest,
            subgroup,
            statistic,
            against,
            out,
        } => commands::stats(g, manifest, subgroup, *statistic, against.as_deref(), out),
        Command::Gaze { manifest, config, out } => commands::gaze(g, manifest, config.as_deref(), out.as_deref()),
        Command::Serve {
            addr,
            corpus_dir,
            max_upload_bytes,
            ttl_secs,
        } => commands::serve(g, *addr, corpus_dir.as_deref(), *max_upload_bytes, *ttl_secs),
        Command::Synth {
            out_dir,
            groups,
            background,
            torso_luma,
            patch_luma,
            width,
            height,
            noise,
        } => commands::synth(g, out_dir, groups, *background, *torso_luma, *patch_luma, *width, *height, *noise),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors on its own
    let cli = Cli::parse();
    init_logging(cli.global.verbose);
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Flagged) => ExitCode::from(EXIT_FLAGGED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
