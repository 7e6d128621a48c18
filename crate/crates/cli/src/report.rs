//! Experiment results, assertions and on-disk artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use halfball_core::ResultTable;
use serde::Serialize;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl Assertion {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, threshold: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= threshold,
            Relation::AtLeast => value >= threshold,
            Relation::Below => value < threshold,
            Relation::Above => value > threshold,
        };
        Assertion {
            name: name.into(),
            value,
            relation,
            threshold,
            passed,
        }
    }

    pub fn line(&self) -> String {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Below => "<",
            Relation::Above => ">",
        };
        format!(
            "{} {}: {:.6e} {} {:.6e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            rel,
            self.threshold
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    /// `(suffix, table)`; the first table is the primary CSV.
    pub tables: Vec<(String, ResultTable)>,
    pub assertions: Vec<Assertion>,
    pub metrics: BTreeMap<String, f64>,
}

impl Report {
    pub fn table(&mut self, suffix: &str, table: ResultTable) {
        self.tables.push((suffix.to_string(), table));
    }

    pub fn check(&mut self, name: impl Into<String>, value: f64, relation: Relation, threshold: f64) {
        self.assertions.push(Assertion::new(name, value, relation, threshold));
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn merge(&mut self, prefix: &str, other: Report) {
        for (s, t) in other.tables {
            let s = if s.is_empty() {
                prefix.to_string()
            } else {
                format!("{prefix}_{s}")
            };
            self.tables.push((s, t));
        }
        for mut a in other.assertions {
            a.name = format!("{prefix}.{}", a.name);
            self.assertions.push(a);
        }
        for (k, v) in other.metrics {
            self.metrics.insert(format!("{prefix}.{k}"), v);
        }
    }
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(null)
    }
}

/// Writes every CSV and the JSON summary; returns the written paths.
pub fn write_artifacts(
    report: &Report,
    config: &ExperimentConfig,
    experiment: &str,
    name: &str,
    dir: &Path,
    wall_time: f64,
    threads: usize,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut csvs = Vec::new();
    for (suffix, table) in &report.tables {
        let file = if suffix.is_empty() {
            format!("{name}.csv")
        } else {
            format!("{name}_{suffix}.csv")
        };
        let path = dir.join(&file);
        fs::write(&path, table.to_csv())?;
        csvs.push(file);
        written.push(path);
    }
    let assertions: Vec<serde_json::Value> = report
        .assertions
        .iter()
        .map(|a| {
            json!({
                "name": a.name,
                "value": finite_or_null(a.value),
                "relation": a.relation,
                "threshold": a.threshold,
                "passed": a.passed,
            })
        })
        .collect();
    let metrics: serde_json::Map<String, serde_json::Value> = report
        .metrics
        .iter()
        .map(|(k, v)| (k.clone(), finite_or_null(*v)))
        .collect();
    let summary = json!({
        "experiment": experiment,
        "name": name,
        "passed": report.passed(),
        "config_hash": config.hash(),
        "config": config,
        "versions": {
            "halfball": env!("CARGO_PKG_VERSION"),
        },
        "seed": config.seed,
        "threads": threads,
        "wall_time_s": wall_time,
        "outputs": csvs,
        "assertions": assertions,
        "metrics": metrics,
    });
    let path = dir.join(format!("{name}.summary.json"));
    fs::write(
        &path,
        serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n",
    )?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assertion_relations() {
        assert!(Assertion::new("a", 1.0, Relation::AtMost, 1.0).passed);
        assert!(!Assertion::new("a", 1.0, Relation::Below, 1.0).passed);
        assert!(!Assertion::new("a", f64::NAN, Relation::AtLeast, 0.0).passed);
        assert!(Assertion::new("a", 2.0, Relation::Above, 1.0)
            .line()
            .starts_with("PASS a:"));
    }
}
