//! Command-line front end for the experiment harness.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use oodlab::harness::{
    load_dir, render_csv, render_markdown, run_and_save, ExperimentConfig, ExperimentId,
};

/// Environment variable naming the default output directory for `run`.
const OUT_ENV: &str = "OODLAB_OUT";

#[derive(Parser)]
#[command(
    name = "oodlab",
    version,
    about = "Extrapolation experiments over feature maps, label maps, and model classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the experiment registry.
    List,
    /// Run one experiment and persist its JSON and CSV records.
    Run {
        /// Experiment id, as shown by `list`.
        experiment: String,
        /// Number of seeds (0..N); defaults per experiment.
        #[arg(long)]
        seeds: Option<usize>,
        /// Output directory; defaults to $OODLAB_OUT or ./results.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Parameter override, repeatable: --set key=value.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Catalog file for experiments that can ingest one.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Publication-scale seed counts and network sizes.
        #[arg(long)]
        full_fidelity: bool,
    },
    /// Render all records found in a results directory.
    Report {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Md,
    Csv,
}

fn default_out() -> PathBuf {
    std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for id in ExperimentId::ALL {
                println!("{:<18} {}", id.as_str(), id.summary());
            }
            Ok(())
        }
        Command::Run {
            experiment,
            seeds,
            out,
            set,
            catalog,
            full_fidelity,
        } => {
            let id: ExperimentId = experiment.parse()?;
            let mut config = ExperimentConfig::new(id);
            if let Some(n) = seeds {
                config = config.with_seed_count(n);
            }
            for pair in &set {
                let Some((key, value)) = pair.split_once('=') else {
                    bail!("--set expects key=value, got `{pair}`");
                };
                config = config.set(key.trim(), value.trim());
            }
            config.catalog = catalog;
            config.full_fidelity = full_fidelity;
            config.validate()?;

            let out_dir = out.unwrap_or_else(default_out);
            let record = run_and_save(&config, &out_dir)
                .with_context(|| format!("running {experiment}"))?;
            println!(
                "{}",
                render_markdown(std::slice::from_ref(&record))?
            );
            println!(
                "wrote {} and {} in {} ms",
                out_dir.join(format!("{id}.json")).display(),
                out_dir.join(format!("{id}.csv")).display(),
                record.wall_ms
            );
            if record.any_failed() {
                for cell in &record.cells {
                    if let Some(err) = &cell.error {
                        eprintln!("cell {} failed: {err}", cell.cell);
                    }
                }
                std::process::exit(1);
            }
            Ok(())
        }
        Command::Report { dir, format } => {
            let records = load_dir(&dir)
                .with_context(|| format!("loading records from {}", dir.display()))?;
            if records.is_empty() {
                bail!("no records in {}", dir.display());
            }
            let mut groups: BTreeMap<ExperimentId, Vec<_>> = BTreeMap::new();
            for record in records {
                groups.entry(record.experiment).or_default().push(record);
            }
            let mut first = true;
            for group in groups.values() {
                if !first {
                    println!();
                }
                first = false;
                let rendered = match format {
                    Format::Md => render_markdown(group)?,
                    Format::Csv => render_csv(group)?,
                };
                print!("{rendered}");
            }
            Ok(())
        }
    }
}
