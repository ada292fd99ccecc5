use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use graph_instruct::core::instruct::TaskKind;
use graph_instruct::pipeline::{self, Targets};
use graph_instruct::{Error, PipelineConfig};

#[derive(Parser, Debug)]
#[command(
    version,
    about = "Compile attributed graphs into instruction-tuning corpora"
)]
struct Cli {
    /// Pipeline config (TOML).
    #[arg(short, long, default_value = "pipeline.toml")]
    config: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load every dataset; write summaries and node energies.
    Ingest,
    /// Render compact descriptions for some or all nodes of a dataset.
    Describe {
        #[arg(short, long)]
        dataset: String,
        #[arg(long, conflicts_with = "nodes")]
        all: bool,
        /// Node ids to describe.
        #[arg(required_unless_present = "all")]
        nodes: Vec<String>,
    },
    /// Plan the allocation and emit instruction packages with a manifest.
    Generate,
    /// Write train/val/test records per task.
    Split,
    /// Score predictions ({id, prediction} lines) against gold records.
    Eval {
        #[arg(short, long, value_parser = parse_task)]
        task: TaskKind,
        #[arg(short, long)]
        dataset: String,
        #[arg(short, long)]
        predictions: PathBuf,
        /// Gold records; defaults to the test split.
        #[arg(short, long)]
        gold: Option<PathBuf>,
    },
    /// ingest, describe --all, generate and split.
    Run,
}

fn parse_task(s: &str) -> Result<TaskKind, String> {
    TaskKind::parse(s).ok_or_else(|| {
        let names: Vec<&str> = TaskKind::ALL.iter().map(|t| t.as_str()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn execute(cli: Cli) -> Result<(), Error> {
    let cfg = PipelineConfig::load(&cli.config)?;
    match cli.command {
        Command::Ingest => {
            for r in pipeline::ingest(&cfg)? {
                println!(
                    "{}: {} nodes, {} edges, total energy {}",
                    r.dataset, r.nodes, r.edges, r.total_energy
                );
            }
        }
        Command::Describe {
            dataset,
            all,
            nodes,
        } => {
            let targets = if all {
                Targets::All
            } else {
                Targets::Ids(nodes)
            };
            let r = pipeline::describe(&cfg, &dataset, &targets)?;
            println!("{} descriptions -> {}", r.written, r.path.display());
            for f in &r.failures {
                eprintln!("error: node `{}`: {}", f.node, f.error);
            }
            if !r.failures.is_empty() {
                return Err(Error::PartialFailure {
                    failed: r.failures.len(),
                    total: r.failures.len() + r.written,
                });
            }
        }
        Command::Generate => {
            let r = pipeline::generate(&cfg)?;
            for p in &r.manifest.pairs {
                println!(
                    "{}/{}: {} packages ({} standard, {} CoT)",
                    p.task, p.dataset, p.emitted_packages, p.standard_records, p.cot_records
                );
            }
            println!("config hash {}", r.manifest.config_hash);
        }
        Command::Split => {
            for s in pipeline::split(&cfg)? {
                println!(
                    "{}/{}: {} / {} / {}",
                    s.task, s.dataset, s.train, s.val, s.test
                );
            }
        }
        Command::Eval {
            task,
            dataset,
            predictions,
            gold,
        } => {
            let r = pipeline::eval(&cfg, task, &dataset, &predictions, gold.as_deref())?;
            println!(
                "{}",
                serde_json::to_string_pretty(&r).expect("report serializes")
            );
            if !r.unmatched_predictions.is_empty() || !r.missing_predictions.is_empty() {
                eprintln!(
                    "warning: {} unmatched predictions, {} gold ids without a prediction",
                    r.unmatched_predictions.len(),
                    r.missing_predictions.len()
                );
            }
        }
        Command::Run => pipeline::run_all(&cfg)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
