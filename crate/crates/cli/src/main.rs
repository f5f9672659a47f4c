use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sonic_ecology::experiments::{run_batch, write_batch, ExperimentConfig, ExperimentKind};
use sonic_ecology::landscape::{single_anchor_scan, write_scan_csv, HarmonicityParams, VoiceTimbre};
use sonic_ecology_cli::parse_seeds;
use sonic_ecology_cli::report::{build_report, load, render, targets};

/// Output root used when `--out` is not given.
const OUT_ENV: &str = "SONIC_OUT";

#[derive(Parser)]
#[command(name = "sonic", version, about = "Run and report sonic ecology experiments")]
struct Cli {
    /// Worker threads for seed batches (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment batch and write its outputs.
    Run {
        /// JSON config; omitted keys take the experiment defaults.
        #[arg(long, required_unless_present = "experiment")]
        config: Option<PathBuf>,
        /// Run an experiment with its default config instead of a file.
        #[arg(long, conflicts_with = "config")]
        experiment: Option<String>,
        /// Seeds as `a..b` (inclusive) or a comma list.
        #[arg(long)]
        seeds: Option<String>,
        /// `key.path=value`, repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Output root [default: $SONIC_OUT or ./out].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a written experiment against the reference targets.
    Report {
        dir: PathBuf,
        /// Print the JSON report instead of the text table.
        #[arg(long)]
        json: bool,
    },
    /// Single-anchor landscape scan as CSV.
    Scan {
        #[arg(long, default_value_t = 220.0)]
        anchor: f64,
        /// Probe range in octaves either side of the anchor.
        #[arg(long, default_value_t = 2.0)]
        span: f64,
        /// Write here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a config file without running it.
    Validate { config: PathBuf },
}

/// Marks failures that are the config's fault (exit status 2).
#[derive(Debug)]
struct ConfigFailure(anyhow::Error);

impl std::fmt::Display for ConfigFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ConfigFailure {}

fn config_err(e: impl Into<anyhow::Error>) -> anyhow::Error {
    ConfigFailure(e.into()).into()
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ExperimentConfig::from_json(&text)
        .map_err(|e| config_err(anyhow::Error::new(e).context(format!("in {}", path.display()))))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigFailure>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Run { config, experiment, seeds, overrides, out } => {
            let mut cfg = match (config, experiment) {
                (Some(p), _) => load_config(&p)?,
                (None, Some(name)) => ExperimentConfig::default_for(ExperimentKind::parse(&name).map_err(config_err)?),
                (None, None) => unreachable!("clap requires one of them"),
            };
            if let Some(s) = seeds {
                cfg.seeds = parse_seeds(&s).map_err(config_err)?;
            }
            let cfg = cfg.with_overrides(&overrides).map_err(config_err)?;
            let root = out
                .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out"));
            let batch = run_batch(&cfg, cli.threads)?;
            let dir = write_batch(&cfg, &batch, &root, &overrides)?;
            eprintln!(
                "{} runs of {} written to {}",
                batch.runs.len(),
                cfg.experiment.name(),
                dir.display()
            );
            Ok(())
        }
        Cmd::Report { dir, json } => {
            let summary = load(&dir)?;
            let report = build_report(&summary, &targets()?);
            let text = serde_json::to_string_pretty(&report)?;
            fs::write(dir.join("report.json"), format!("{text}\n"))?;
            if json {
                println!("{text}");
            } else {
                print!("{}", render(&report));
            }
            Ok(())
        }
        Cmd::Scan { anchor, span, output } => {
            let rows = single_anchor_scan(anchor, span, &VoiceTimbre::default(), &HarmonicityParams::default())
                .map_err(config_err)?;
            match output {
                Some(p) => write_scan_csv(&rows, fs::File::create(&p)?)?,
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    write_scan_csv(&rows, &mut lock)?;
                    lock.flush()?;
                }
            }
            Ok(())
        }
        Cmd::Validate { config } => {
            let cfg = load_config(&config)?;
            println!(
                "ok: {} with {} conditions x {} seeds",
                cfg.experiment.name(),
                cfg.conditions.len(),
                cfg.seeds.len()
            );
            Ok(())
        }
    }
}
