//! `wjgap`: runs the built-in experiments and writes their CSV artifacts.
//!
//! Exit status is 0 on success, 2 for a rejected config, 3 for a numerical
//! failure and 4 for an I/O failure; failures print one JSON record on
//! stderr.

mod config;
mod experiments;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "wjgap", version, about = "Wasserstein decay and WJ constant experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Also write SVG plots of the metrics.
        #[arg(long)]
        plots: bool,
        /// Output directory; overrides `output_dir` of the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the seed of the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Prints the experiment registry.
    List {
        #[arg(long)]
        csv: bool,
    },
}

struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl Failure {
    fn report(&self) -> ExitCode {
        let record = json!({ "status": "error", "code": self.code, "kind": self.kind, "message": self.message });
        eprintln!("{record}");
        ExitCode::from(self.code)
    }
}

impl From<config::SchemaError> for Failure {
    fn from(e: config::SchemaError) -> Self {
        Failure { code: 2, kind: "SchemaError".into(), message: e.to_string() }
    }
}

impl From<wjgap_core::Error> for Failure {
    fn from(e: wjgap_core::Error) -> Self {
        Failure { code: 3, kind: e.kind().into(), message: e.to_string() }
    }
}

impl From<output::OutputError> for Failure {
    fn from(e: output::OutputError) -> Self {
        Failure { code: 4, kind: "OutputError".into(), message: e.to_string() }
    }
}

fn run(path: &std::path::Path, plots: bool, out: Option<PathBuf>, seed: Option<u64>) -> Result<(), Failure> {
    let cfg = config::load(path)?;
    let (info, params) = cfg.resolve(seed)?;
    let dir = out.or(cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out").join(info.name));
    let outputs = (info.run)(&params)?;
    let written = output::write_all(&dir, &outputs, plots)?;
    println!("{} (measure {}, seed {})", info.name, params.measure, params.seed);
    for line in &outputs.summary {
        println!("  {line}");
    }
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn list(csv: bool) -> Result<(), Failure> {
    if csv {
        let mut w = csv::Writer::from_writer(std::io::stdout());
        let io = |e: csv::Error| Failure { code: 4, kind: "OutputError".into(), message: e.to_string() };
        w.write_record(["name", "default_measure", "measures", "reproduces"]).map_err(io)?;
        for e in &experiments::REGISTRY {
            w.write_record([e.name, e.defaults.measure, &e.measures.join(";"), e.anchor]).map_err(io)?;
        }
        w.flush().map_err(|e| Failure { code: 4, kind: "OutputError".into(), message: e.to_string() })?;
    } else {
        for e in &experiments::REGISTRY {
            println!("{:<22} {:<12} {}", e.name, e.defaults.measure, e.anchor);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, plots, out, seed } => run(&config, plots, out, seed),
        Command::List { csv } => list(csv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
