//! Summaries of a results directory written by [`super::write_results`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::metrics::median;

#[derive(Debug, Deserialize)]
struct Row {
    scenario: String,
    algorithm: String,
    #[allow(dead_code)]
    run: usize,
    indicator: String,
    value: f64,
}

/// Five-number summary of one (scenario, algorithm, indicator) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub n: usize,
}

impl BoxStats {
    pub fn of(values: &[f64]) -> Option<Self> {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let half = v.len() / 2;
        let (lo, hi) = if v.len().is_multiple_of(2) {
            (&v[..half], &v[half..])
        } else {
            (&v[..half], &v[half + 1..])
        };
        let q = |s: &[f64]| median(s).unwrap_or(v[half]);
        Some(Self {
            min: v[0],
            q1: q(lo),
            median: median(&v)?,
            q3: q(hi),
            max: v[v.len() - 1],
            n: v.len(),
        })
    }
}

type Cells = BTreeMap<(String, String, String), Vec<f64>>;

fn collect(root: &Path) -> Result<Cells> {
    let mut cells = Cells::new();
    let mut found = false;
    let mut dirs: Vec<_> = fs::read_dir(root)?.collect::<std::io::Result<_>>()?;
    dirs.sort_by_key(|e| e.path());
    for entry in dirs {
        let path = entry.path().join("indicators.csv");
        if !path.is_file() {
            continue;
        }
        found = true;
        let mut reader =
            csv::Reader::from_path(&path).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        for row in reader.deserialize::<Row>() {
            let row = row.map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
            cells
                .entry((row.scenario, row.indicator, row.algorithm))
                .or_default()
                .push(row.value);
        }
    }
    if !found {
        return Err(Error::config(format!(
            "{} holds no scenario results (no */indicators.csv)",
            root.display()
        )));
    }
    Ok(cells)
}

/// Writes `report.md` and `boxplot.csv` into `root`.
pub fn write_report(root: &Path) -> Result<()> {
    let cells = collect(root)?;
    let mut csv = String::from("scenario,indicator,algorithm,n,min,q1,median,q3,max\n");
    let mut md = String::from("# Results\n");
    let mut current = (String::new(), String::new());
    for ((scenario, indicator, alg), values) in &cells {
        let Some(b) = BoxStats::of(values) else {
            continue;
        };
        let _ = writeln!(
            csv,
            "{scenario},{indicator},{alg},{},{},{},{},{},{}",
            b.n, b.min, b.q1, b.median, b.q3, b.max
        );
        if current.0 != *scenario {
            let _ = write!(md, "\n## {scenario}\n");
            current.1.clear();
        }
        if current != (scenario.clone(), indicator.clone()) {
            let _ = write!(
                md,
                "\n### {indicator}\n\n| algorithm | runs | min | q1 | median | q3 | max |\n|---|---|---|---|---|---|---|\n"
            );
            current = (scenario.clone(), indicator.clone());
        }
        let _ = writeln!(
            md,
            "| {alg} | {} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} |",
            b.n, b.min, b.q1, b.median, b.q3, b.max
        );
    }
    fs::write(root.join("boxplot.csv"), csv)?;
    fs::write(root.join("report.md"), md)?;
    Ok(())
}
