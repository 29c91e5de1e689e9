use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::Common;

/// Writes the JSON report where asked and prints the summary unless the
/// report itself went to stdout.
pub fn emit<T: Serialize>(common: &Common, report: &T, summary: &[(String, String)]) -> Result<()> {
    let to_stdout = common.json.as_deref().is_some_and(|p| p == Path::new("-"));
    if let Some(path) = &common.json {
        let text = serde_json::to_string_pretty(report)? + "\n";
        if to_stdout {
            io::stdout().write_all(text.as_bytes())?;
        } else {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    if !to_stdout {
        let width = summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = io::stdout().lock();
        for (k, v) in summary {
            writeln!(out, "{k:<width$}  {v}")?;
        }
    }
    Ok(())
}

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn fmt(v: f64) -> String {
    format!("{v:.6}")
}
