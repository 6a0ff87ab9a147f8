use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::scenario::{Method, Scenario};
use crate::error::{Error, Result};
use crate::ingest::{create, finish, lines, parse_field};

const HEADER: &str = "scenario,method,seed,cc,mae";

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: Scenario,
    pub method: Method,
    pub seed: u64,
    pub cc: f64,
    pub mae: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    /// Seeds that break the expected event-beats-video ordering.
    pub flags: Vec<String>,
}

/// Mean scores of one scenario per method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSummary {
    pub eenf_cc: f64,
    pub eenf_mae: f64,
    pub venf_cc: f64,
    pub venf_mae: f64,
}

impl Report {
    pub fn merge(&mut self, other: Report) {
        self.rows.extend(other.rows);
        self.flags.extend(other.flags);
    }

    /// Mean `(cc, mae)` over the rows of one scenario and method.
    pub fn mean(&self, scenario: Scenario, method: Method) -> Option<(f64, f64)> {
        let rows: Vec<&ReportRow> = self
            .rows
            .iter()
            .filter(|r| r.scenario == scenario && r.method == method)
            .collect();
        if rows.is_empty() {
            return None;
        }
        let n = rows.len() as f64;
        Some((
            rows.iter().map(|r| r.cc).sum::<f64>() / n,
            rows.iter().map(|r| r.mae).sum::<f64>() / n,
        ))
    }

    pub fn summaries(&self) -> BTreeMap<Scenario, ScenarioSummary> {
        let mut out = BTreeMap::new();
        for s in Scenario::ALL {
            if let (Some(e), Some(v)) = (self.mean(s, Method::Eenf), self.mean(s, Method::Venf)) {
                out.insert(
                    s,
                    ScenarioSummary {
                        eenf_cc: e.0,
                        eenf_mae: e.1,
                        venf_cc: v.0,
                        venf_mae: v.1,
                    },
                );
            }
        }
        out
    }
}

/// Writes `report.csv` and a markdown `summary.md` into `dir`.
pub fn emit_report(report: &Report, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let csv = dir.join("report.csv");
    let mut w = create(&csv)?;
    let io = |e| Error::io(&csv, e);
    writeln!(w, "{HEADER}").map_err(io)?;
    for r in &report.rows {
        writeln!(w, "{},{},{},{},{}", r.scenario, r.method, r.seed, r.cc, r.mae).map_err(io)?;
    }
    finish(&csv, w)?;

    let md = dir.join("summary.md");
    let mut w = create(&md)?;
    let io = |e| Error::io(&md, e);
    writeln!(w, "# Synthetic ENF extraction summary\n").map_err(io)?;
    writeln!(w, "Means over seeds; ground truth is the simulated mains recording.\n").map_err(io)?;
    writeln!(w, "| Scenario | Method | CC | MAE (Hz) |").map_err(io)?;
    writeln!(w, "|---|---|---|---|").map_err(io)?;
    for (s, sum) in report.summaries() {
        writeln!(w, "| {s} | Video | {:.4} | {:.2e} |", sum.venf_cc, sum.venf_mae).map_err(io)?;
        writeln!(w, "| {s} | Event | {:.4} | {:.2e} |", sum.eenf_cc, sum.eenf_mae).map_err(io)?;
    }
    if !report.flags.is_empty() {
        writeln!(w, "\n## Flagged seeds\n").map_err(io)?;
        for f in &report.flags {
            writeln!(w, "- {f}").map_err(io)?;
        }
    }
    finish(&md, w)
}

/// Reads the rows of a `report.csv`; flags are not stored there.
pub fn read_report_csv(path: impl AsRef<Path>) -> Result<Report> {
    let mut report = Report::default();
    for (line, text) in lines(path.as_ref())? {
        let text = text.trim();
        if text.is_empty() || text == HEADER {
            continue;
        }
        let f: Vec<&str> = text.split(',').collect();
        if f.len() != 5 {
            return Err(Error::Parse {
                line,
                message: format!("expected 5 fields, found {}", f.len()),
            });
        }
        report.rows.push(ReportRow {
            scenario: f[0].parse().map_err(|_| Error::Parse {
                line,
                message: "unknown scenario".into(),
            })?,
            method: f[1].parse().map_err(|_| Error::Parse {
                line,
                message: "unknown method".into(),
            })?,
            seed: parse_field(line, f[2], "seed")?,
            cc: parse_field(line, f[3], "cc")?,
            mae: parse_field(line, f[4], "mae")?,
        });
    }
    Ok(report)
}
