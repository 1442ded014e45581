//! Batch runs over a manifest of reprogramming instances.
//!
//! A manifest is a JSON array of entries
//! `{"network": path, "marker": path | object, "k": int, "variant": 0|1|2,
//! "timeout": seconds, "allow_marker_nodes": bool}`; only `network`, `marker`
//! and `k` are required. Paths are relative to the manifest. Each entry is
//! solved twice: once for the first solution and once for the full
//! enumeration. Failures are reported per row and never stop the run.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use trapmark::cegar::{enumerate_reprogramming, solve_reprogramming, RefinementVariant, ReprogrammingOptions, Status};
use trapmark::{NameIndex, PartialAssignment};

use crate::input::{read_marker, read_network};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub network: PathBuf,
    pub marker: Value,
    pub k: usize,
    #[serde(default)]
    pub variant: Option<u8>,
    #[serde(default)]
    pub timeout: Option<f64>,
    #[serde(default)]
    pub allow_marker_nodes: bool,
}

#[derive(Debug, Serialize)]
pub struct Row {
    pub index: usize,
    pub network: String,
    pub k: usize,
    pub variant: String,
    /// `done`, `timeout` or `error`.
    pub status: String,
    pub first_ms: Option<f64>,
    pub enum_ms: Option<f64>,
    pub n_solutions: Option<usize>,
    pub n_counter_examples: Option<u64>,
    pub error: Option<String>,
}

pub fn load_manifest(path: &Path) -> Result<Vec<Entry>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
}

pub fn run(entries: &[Entry], base: &Path, workers: Option<usize>) -> Result<Vec<Row>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder.build()?;
    Ok(pool.install(|| {
        entries
            .par_iter()
            .enumerate()
            .map(|(index, e)| run_entry(index, e, base))
            .collect()
    }))
}

fn run_entry(index: usize, e: &Entry, base: &Path) -> Row {
    let variant = e
        .variant
        .map(|v| v.to_string().parse::<RefinementVariant>())
        .transpose();
    let mut row = Row {
        index,
        network: e.network.display().to_string(),
        k: e.k,
        variant: String::new(),
        status: "error".into(),
        first_ms: None,
        enum_ms: None,
        n_solutions: None,
        n_counter_examples: None,
        error: None,
    };
    let result = variant.map_err(anyhow::Error::from).and_then(|v| {
        let v = v.unwrap_or_default();
        row.variant = v.to_string();
        solve_entry(e, base, v, &mut row)
    });
    if let Err(err) = result {
        row.status = "error".into();
        row.error = Some(format!("{err:#}"));
    }
    row
}

fn solve_entry(e: &Entry, base: &Path, variant: RefinementVariant, row: &mut Row) -> Result<()> {
    let f = read_network(&base.join(&e.network))?;
    let marker = match &e.marker {
        Value::String(path) => read_marker(path, f.names(), Some(base))?,
        other => PartialAssignment::from_json_value(&NameIndex::new(f.names().to_vec())?, other)?,
    };
    let options = ReprogrammingOptions {
        variant,
        forbid_marker_nodes: !e.allow_marker_nodes,
        timeout: e.timeout.map(Duration::from_secs_f64),
        ..ReprogrammingOptions::default()
    };

    let start = Instant::now();
    let first = solve_reprogramming(&f, &marker, e.k, &options)?;
    let first_ms = start.elapsed().as_secs_f64() * 1e3;
    row.first_ms = (first.status != Status::Timeout).then_some(first_ms);

    let start = Instant::now();
    let all = enumerate_reprogramming(&f, &marker, e.k, &options)?;
    let enum_ms = start.elapsed().as_secs_f64() * 1e3;
    row.n_solutions = Some(all.solutions.len());
    row.n_counter_examples = Some(all.stats.counter_examples);
    if all.status == Status::Timeout {
        row.status = "timeout".into();
    } else {
        row.status = "done".into();
        row.enum_ms = Some(enum_ms);
    }
    Ok(())
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
