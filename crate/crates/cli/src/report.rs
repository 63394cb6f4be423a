//! `report`: per-file distances to the limiting measure and per-ensemble
//! trends in `n`.

use crate::config::{parse_config_text, Ensemble, RunConfig};
use crate::sample::limit_measure;
use crate::table::{Cell, Table};
use crate::CliError;
use clap::ValueEnum;
use coulomb_core::stats::{ks_distance, w1_radial_radii};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Single,
    Decreasing,
    Increasing,
    Mixed,
}

impl Trend {
    pub fn name(self) -> &'static str {
        match self {
            Trend::Single => "single",
            Trend::Decreasing => "decreasing",
            Trend::Increasing => "increasing",
            Trend::Mixed => "mixed",
        }
    }
}

/// Strict monotonicity of `values` (ordered by increasing `n`).
pub fn trend(values: &[f64]) -> Trend {
    if values.len() < 2 {
        Trend::Single
    } else if values.windows(2).all(|w| w[1] < w[0]) {
        Trend::Decreasing
    } else if values.windows(2).all(|w| w[1] > w[0]) {
        Trend::Increasing
    } else {
        Trend::Mixed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub source: String,
    pub ensemble: Ensemble,
    pub n: usize,
    pub samples: usize,
    pub w1_radial: f64,
    pub ks_radial: f64,
}

/// Reconstructs the run configuration from a data file's metadata.
fn config_from_metadata(table: &Table, path: &Path) -> Result<RunConfig, CliError> {
    let text: String = table.metadata.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
    let map = parse_config_text(
        &text.lines().filter(|l| !l.starts_with("version=")).collect::<Vec<_>>().join("\n"),
    )?;
    let missing = |k: &str| CliError::Input(format!("{}: metadata lacks `{k}`", path.display()));
    let ensemble = Ensemble::from_str(map.get("ensemble").ok_or_else(|| missing("ensemble"))?, true)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let num = |k: &str| -> Result<usize, CliError> {
        map.get(k).ok_or_else(|| missing(k))?.parse().map_err(|_| CliError::Input(format!("bad `{k}`")))
    };
    Ok(RunConfig {
        ensemble,
        n: num("n")?,
        beta: map.get("beta").and_then(|b| b.parse().ok()).unwrap_or(2.0),
        dim: map.get("dim").and_then(|d| d.parse().ok()).unwrap_or(2),
        m: map.get("m").and_then(|m| m.parse().ok()),
        ..RunConfig::default()
    })
}

pub fn summarize(path: &Path) -> Result<SummaryRow, CliError> {
    let table = Table::read(path)?;
    let cfg = config_from_metadata(&table, path)?;
    let coord_cols: Vec<usize> =
        (1..).map(|k| table.column(&format!("coord_{k}"))).take_while(Option::is_some).flatten().collect();
    let sample_col = table.column("sample_index");
    if coord_cols.is_empty() || sample_col.is_none() {
        return Err(CliError::Input(format!("{}: not a sample file", path.display())));
    }
    let mut radii = Vec::with_capacity(table.rows.len());
    let mut samples = BTreeSet::new();
    for row in &table.rows {
        let coords: Option<Vec<f64>> = coord_cols.iter().map(|&c| row[c].as_f64()).collect();
        let coords = coords.ok_or_else(|| CliError::Input(format!("{}: non-numeric coordinate", path.display())))?;
        radii.push(coords.iter().map(|x| x * x).sum::<f64>().sqrt());
        samples.insert(row[sample_col.unwrap()].as_text());
    }
    let measure = limit_measure(&cfg)?;
    Ok(SummaryRow {
        source: path.display().to_string(),
        ensemble: cfg.ensemble,
        n: cfg.n,
        samples: samples.len(),
        w1_radial: w1_radial_radii(&radii, &measure)?,
        ks_radial: ks_distance(&radii, |r| measure.radial_cdf(r))?,
    })
}

pub fn report_table(inputs: &[PathBuf]) -> Result<Table, CliError> {
    if inputs.is_empty() {
        return Err(CliError::Usage("report needs at least one input file".into()));
    }
    let mut rows: Vec<SummaryRow> = inputs.iter().map(|p| summarize(p)).collect::<Result<_, _>>()?;
    rows.sort_by(|a, b| (a.ensemble, a.n, &a.source).cmp(&(b.ensemble, b.n, &b.source)));
    let mut t = Table::new(
        ["source", "ensemble", "n", "samples", "w1_radial", "ks_radial", "w1_trend", "ks_trend"]
            .map(String::from)
            .to_vec(),
    );
    t.metadata.push(("version".into(), crate::VERSION.into()));
    for r in &rows {
        let group: Vec<&SummaryRow> = rows.iter().filter(|g| g.ensemble == r.ensemble).collect();
        let w1: Vec<f64> = group.iter().map(|g| g.w1_radial).collect();
        let ks: Vec<f64> = group.iter().map(|g| g.ks_radial).collect();
        t.rows.push(vec![
            Cell::Text(r.source.clone()),
            Cell::Text(r.ensemble.name().into()),
            Cell::Int(r.n as u64),
            Cell::Int(r.samples as u64),
            Cell::Float(r.w1_radial),
            Cell::Float(r.ks_radial),
            Cell::Text(trend(&w1).name().into()),
            Cell::Text(trend(&ks).name().into()),
        ]);
    }
    Ok(t)
}
