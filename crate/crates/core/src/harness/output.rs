//! On-disk layout.
//!
//! A single batch writes flat into the output directory:
//!
//! ```text
//! summary.csv  config.json  trace_run<k>.csv  best_run<k>.genome.json
//! ```
//!
//! Several batches (a sweep, or more than one measure) write `summary.csv`
//! and `config.json` at the top and one subdirectory per batch, named by
//! [`batch_dir_name`], holding that batch's `config.json` and per-run files.

use std::fs;
use std::path::{Path, PathBuf};

use super::{task_context, BatchResult, BatchSummary, ExperimentConfig, HarnessError, TraceRow};
use crate::env::{evaluate, evaluate_test};
use crate::genome::Genome;

pub const TRACE_HEADER: &str =
    "generation,best_train,global_efficiency,local_efficiency,eigenvector_centrality,entropy,connections,nodes";

pub fn batch_dir_name(index: usize, summary: &BatchSummary) -> String {
    format!("b{index:02}_{}_p{}", summary.measure, summary.pressure)
}

fn write(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

fn read(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

fn to_csv<T: serde::Serialize>(rows: &[T]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv output is utf-8")
}

fn trace_csv(rows: &[TraceRow]) -> String {
    if rows.is_empty() {
        return format!("{TRACE_HEADER}\n");
    }
    to_csv(rows)
}

fn write_batch_files(dir: &Path, batch: &BatchResult) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::new();
    let cfg_path = dir.join("config.json");
    write(&cfg_path, &(batch.config.to_json() + "\n"))?;
    written.push(cfg_path);
    for run in &batch.runs {
        let trace = dir.join(format!("trace_run{}.csv", run.run_index));
        write(&trace, &trace_csv(&run.trace))?;
        let genome = dir.join(format!("best_run{}.genome.json", run.run_index));
        write(&genome, &(run.best.to_json() + "\n"))?;
        written.push(trace);
        written.push(genome);
    }
    Ok(written)
}

/// Writes every file for `batches` under `dir` and returns their paths.
/// `echo` is the configuration recorded at the top level.
pub fn write_outputs(
    dir: &Path,
    batches: &[BatchResult],
    echo: &ExperimentConfig,
) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let summaries: Vec<BatchSummary> = batches.iter().map(|b| b.summary.clone()).collect();
    let mut written = Vec::new();
    if let [only] = batches {
        written.extend(write_batch_files(dir, only)?);
    } else {
        let top = dir.join("config.json");
        write(&top, &(echo.to_json() + "\n"))?;
        written.push(top);
        for (k, b) in batches.iter().enumerate() {
            written.extend(write_batch_files(&dir.join(batch_dir_name(k, &b.summary)), b)?);
        }
    }
    let summary = dir.join("summary.csv");
    write(&summary, &to_csv(&summaries))?;
    written.push(summary);
    Ok(written)
}

/// Batch directories under `dir`: subdirectories holding a `config.json`
/// (sorted by name), or `dir` itself when there are none.
fn batch_dirs(dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut subs = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| HarnessError::io(dir, e))? {
        let entry = entry.map_err(|e| HarnessError::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() && path.join("config.json").is_file() {
            subs.push(path);
        }
    }
    subs.sort();
    if subs.is_empty() {
        subs.push(dir.to_path_buf());
    }
    Ok(subs)
}

fn load_config(dir: &Path) -> Result<ExperimentConfig, HarnessError> {
    let path = dir.join("config.json");
    serde_json::from_str(&read(&path)?)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

/// Rebuilds `summary.csv` from per-run files by re-evaluating each saved
/// best genome on its run's train and test data.
pub fn report(dir: &Path) -> Result<Vec<BatchSummary>, HarnessError> {
    let mut summaries = Vec::new();
    for bdir in batch_dirs(dir)? {
        let cfg = load_config(&bdir)?;
        let mut values = Vec::with_capacity(cfg.runs);
        for k in 0..cfg.runs {
            let path = bdir.join(format!("best_run{k}.genome.json"));
            let genome = Genome::from_json(&read(&path)?)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            let task = task_context(&cfg, k)?;
            let train = evaluate(&genome, &task, cfg.eigen)?.performance;
            let test = evaluate_test(&genome, &task)?;
            values.push((train, test, genome.enabled_count(), genome.node_count()));
        }
        summaries.push(BatchSummary::from_values(cfg.measure, cfg.pressure, &values));
    }
    write(&dir.join("summary.csv"), &to_csv(&summaries))?;
    Ok(summaries)
}

/// All trace files under `dir` as one CSV with measure, pressure and run
/// columns prepended.
pub fn concat_traces(dir: &Path) -> Result<String, HarnessError> {
    let mut out = format!("measure,pressure,run,{TRACE_HEADER}\n");
    for bdir in batch_dirs(dir)? {
        let cfg = load_config(&bdir)?;
        for k in 0..cfg.runs {
            let text = read(&bdir.join(format!("trace_run{k}.csv")))?;
            for line in text.lines().skip(1).filter(|l| !l.is_empty()) {
                out.push_str(&format!("{},{},{k},{line}\n", cfg.measure, cfg.pressure));
            }
        }
    }
    Ok(out)
}
