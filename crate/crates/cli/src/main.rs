//! `spectral-nls`: run one configured experiment and write its CSV, SVG and summary.
//!
//! Exit status: 0 success, 1 invalid flags or configuration, 2 runtime failure,
//! 3 a `*_pass` check failed under `--check`.

mod config;
mod report;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use config::ExperimentConfig;

#[derive(Debug, Parser)]
#[command(name = "spectral-nls", version, about = "Run a spectral cluster / NLS experiment")]
struct Cli {
    /// TOML experiment configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory (overrides `out` in the config; default `out`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed (overrides `seed` in the config).
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Shrink scan grids about fourfold.
    #[arg(long)]
    quick: bool,
    /// Exit with status 3 when an acceptance check fails.
    #[arg(long)]
    check: bool,
}

fn write_outputs(dir: &Path, art: &run::Artifacts) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, body) in &art.files {
        let p = dir.join(name);
        fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
    }
    let p = dir.join("summary.txt");
    fs::write(&p, art.summary.render()).with_context(|| format!("writing {}", p.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut cfg = match ExperimentConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invalid configuration: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.quick {
        cfg.quick();
    }
    if let Err(e) = cfg.validate() {
        eprintln!("invalid configuration: {e}");
        return ExitCode::from(1);
    }
    if cli.threads == Some(0) {
        eprintln!("invalid configuration: --threads: must be at least 1");
        return ExitCode::from(1);
    }
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let art = match pool.build() {
        Ok(p) => p.install(|| run::run(&cfg)),
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = write_outputs(&out, &art) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if let Some(e) = &art.error {
        eprintln!("error: {} failed: {e}", cfg.experiment.name());
        return ExitCode::from(2);
    }
    print!("{}", art.summary.render());
    let failed = art.summary.failed_checks();
    if cli.check && !failed.is_empty() {
        eprintln!("failed checks: {}", failed.join(", "));
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
