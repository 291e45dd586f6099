//! `neatflow` command-line front end.
//!
//! Exit codes: 0 success, 1 configuration error, 2 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use neatflow::harness::{self, run_grid, with_threads, write_outputs, ExperimentConfig, HarnessError, Task};
use neatflow::MeasureVariant;

#[derive(Parser)]
#[command(name = "neatflow", version, about = "Evolve networks that balance information flow against wiring cost")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of independent evolutionary runs.
    Run {
        #[command(flatten)]
        opts: RunOpts,
        /// Selection pressure p.
        #[arg(long)]
        pressure: Option<f64>,
    },
    /// Run one batch per pressure value with shared seeds.
    Sweep {
        #[command(flatten)]
        opts: RunOpts,
        /// Comma-separated pressure values.
        #[arg(long = "p", value_delimiter = ',', default_value = "0,0.15,0.5")]
        p_values: Vec<f64>,
    },
    /// Rebuild summary.csv in DIR from its per-run files.
    Report { dir: PathBuf },
    /// Concatenate every trace in DIR into one CSV.
    Trace {
        dir: PathBuf,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunOpts {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    task: Option<Task>,
    /// Measure variant(s), comma-separated (perf, le_cost, ec_ratio, ...).
    #[arg(long, value_delimiter = ',')]
    measure: Vec<MeasureVariant>,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    gens: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Dataset file for iris / wdbc.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cart-pole at population 150, 5000 generations.
    #[arg(long)]
    full_scale: bool,
    /// Worker threads for evaluation (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl RunOpts {
    fn resolve(&self) -> Result<(ExperimentConfig, Vec<MeasureVariant>), HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
                    path: path.display().to_string(),
                    source: e,
                })?;
                let mut value: serde_json::Value = serde_json::from_str(&text)
                    .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
                // Task-dependent defaults apply unless the file sets them.
                let task = match (self.task, value.get("task")) {
                    (Some(t), _) => t,
                    (None, Some(t)) => serde_json::from_value(t.clone())
                        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?,
                    (None, None) => Task::Iris,
                };
                let mut base = serde_json::to_value(ExperimentConfig::for_task(task)).expect("config is json");
                merge(&mut base, value.take());
                serde_json::from_value(base).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?
            }
            None => ExperimentConfig::for_task(self.task.unwrap_or(Task::Iris)),
        };
        if let Some(t) = self.task {
            cfg.task = t;
        }
        if self.full_scale {
            cfg = cfg.full_scale();
        }
        if let Some(v) = self.pop {
            cfg.population_size = v;
        }
        if let Some(v) = self.gens {
            cfg.generations = v;
        }
        if let Some(v) = self.runs {
            cfg.runs = v;
        }
        if let Some(v) = self.seed {
            cfg.base_seed = v;
        }
        if let Some(v) = &self.data {
            cfg.data_path = Some(v.clone());
        }
        if let Some(v) = &self.out {
            cfg.output_dir = Some(v.clone());
        }
        let measures = if self.measure.is_empty() { vec![cfg.measure] } else { self.measure.clone() };
        cfg.measure = measures[0];
        Ok((cfg, measures))
    }
}

fn merge(base: &mut serde_json::Value, over: serde_json::Value) {
    match (base, over) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                merge(b.entry(k).or_insert(serde_json::Value::Null), v);
            }
        }
        (b, o) => *b = o,
    }
}

fn execute(opts: &RunOpts, pressures: Option<Vec<f64>>) -> Result<(), HarnessError> {
    let (mut cfg, measures) = opts.resolve()?;
    let p_values = pressures.unwrap_or_else(|| vec![cfg.pressure]);
    cfg.pressure = p_values.first().copied().unwrap_or(cfg.pressure);
    cfg.validate()?;
    for &p in &p_values {
        ExperimentConfig { pressure: p, ..cfg.clone() }.validate()?;
    }
    let out = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("results"));
    let batches = with_threads(opts.threads, || run_grid(&cfg, &measures, &p_values))??;
    write_outputs(&out, &batches, &cfg)?;
    for b in &batches {
        let s = &b.summary;
        println!(
            "{:<10} p={:<5} train={:.4} test={:.4} connections={:.2} nodes={:.2} runs={}",
            s.measure.name(),
            s.pressure,
            s.mean_train,
            s.mean_test,
            s.mean_connections,
            s.mean_nodes,
            s.runs
        );
    }
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn trace(dir: &Path, out: Option<&Path>) -> Result<(), HarnessError> {
    let csv = harness::concat_traces(dir)?;
    match out {
        Some(path) => std::fs::write(path, csv).map_err(|e| HarnessError::Io {
            path: path.display().to_string(),
            source: e,
        }),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Run { opts, pressure } => execute(opts, pressure.map(|p| vec![p])),
        Command::Sweep { opts, p_values } => execute(opts, Some(p_values.clone())),
        Command::Report { dir } => harness::report(dir).map(|rows| {
            for s in rows {
                println!("{} p={} test={:.4}", s.measure.name(), s.pressure, s.mean_test);
            }
        }),
        Command::Trace { dir, out } => trace(dir, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_io() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
