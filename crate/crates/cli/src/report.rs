//! Report assembly: every experiment produces an [`Outcome`] (assertions,
//! decay tables, extra scalars, side artifacts); the runner serializes it
//! into an output directory as `report.json` plus one CSV and one SVG per
//! table.  Tables are a pure function of (config, seed), so reruns produce
//! byte-identical CSV/SVG; `report.json` additionally carries wall-clock.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use modmax_core::decay::DecayTable;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::plot::{emit_plot, PlotStyle};

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// What an experiment hands back to the runner.
#[derive(Default)]
pub struct Outcome {
    pub assertions: Vec<Assertion>,
    pub tables: Vec<(DecayTable, PlotStyle)>,
    /// Named scalars worth keeping next to the tables (bounds, counts).
    pub extras: BTreeMap<String, serde_json::Value>,
    /// Extra files to write verbatim: (file name, contents).
    pub artifacts: Vec<(String, String)>,
}

impl Outcome {
    pub fn push_extra(&mut self, key: &str, value: impl Serialize) {
        self.extras.insert(
            key.to_string(),
            serde_json::to_value(value).expect("extras serialize"),
        );
    }
}

#[derive(Serialize)]
struct TableRef {
    label: String,
    rows: usize,
    csv: String,
    svg: Option<String>,
}

#[derive(Serialize)]
struct Report<'a> {
    experiment: &'a str,
    version: &'a str,
    config: serde_json::Value,
    seed_override: Option<u64>,
    threads: usize,
    /// True when the configured ranges produced no assertions at all; the
    /// run then passes vacuously and is flagged as such.
    vacuous: bool,
    passed: bool,
    assertions: &'a [Assertion],
    tables: Vec<TableRef>,
    extras: &'a BTreeMap<String, serde_json::Value>,
    artifacts: Vec<String>,
    wall_clock_seconds: f64,
}

fn slug(label: &str) -> String {
    let mut out = String::new();
    let mut last_dash = true;
    for c in label.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
            last_dash = false;
        } else if !last_dash {
            out.push('-');
            last_dash = true;
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| Error::Io { path, source })
}

pub struct RunInfo<'a> {
    pub experiment: &'a str,
    pub config_echo: serde_json::Value,
    pub seed_override: Option<u64>,
    pub threads: usize,
    pub wall_clock_seconds: f64,
}

/// Writes the report, tables, plots, and artifacts into `out_dir` and
/// prints a PASS/FAIL line per assertion.  Returns overall success.
pub fn write_all(out_dir: &Path, info: &RunInfo<'_>, outcome: &Outcome) -> Result<bool> {
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let mut table_refs = Vec::new();
    for (idx, (table, style)) in outcome.tables.iter().enumerate() {
        let base = format!("table-{idx:02}-{}", slug(&table.label));
        let csv_name = format!("{base}.csv");
        write_file(out_dir, &csv_name, &table.to_csv())?;
        let svg_name = match emit_plot(table, *style) {
            Ok(svg) => {
                let name = format!("{base}.svg");
                write_file(out_dir, &name, &svg)?;
                Some(name)
            }
            Err(Error::EmptyTable) => None,
            Err(e) => return Err(e),
        };
        table_refs.push(TableRef {
            label: table.label.clone(),
            rows: table.rows.len(),
            csv: csv_name,
            svg: svg_name,
        });
    }

    let mut artifact_names = Vec::new();
    for (name, contents) in &outcome.artifacts {
        write_file(out_dir, name, contents)?;
        artifact_names.push(name.clone());
    }

    let vacuous = outcome.assertions.is_empty();
    let passed = outcome.assertions.iter().all(|a| a.passed);
    let report = Report {
        experiment: info.experiment,
        version: env!("CARGO_PKG_VERSION"),
        config: info.config_echo.clone(),
        seed_override: info.seed_override,
        threads: info.threads,
        vacuous,
        passed,
        assertions: &outcome.assertions,
        tables: table_refs,
        extras: &outcome.extras,
        artifacts: artifact_names,
        wall_clock_seconds: info.wall_clock_seconds,
    };
    let mut rendered = serde_json::to_string_pretty(&report).expect("report serialize");
    rendered.push('\n');
    write_file(out_dir, "report.json", &rendered)?;

    for a in &outcome.assertions {
        println!(
            "{} {} ({})",
            if a.passed { "PASS" } else { "FAIL" },
            a.name,
            a.detail
        );
    }
    if vacuous {
        println!("no assertions produced by the configured ranges: pass-vacuous");
    }
    println!("report: {}", out_dir.join("report.json").display());
    Ok(passed)
}

pub fn out_dir(flag: Option<PathBuf>, from_config: Option<PathBuf>) -> PathBuf {
    flag.or(from_config).unwrap_or_else(|| PathBuf::from("out"))
}
