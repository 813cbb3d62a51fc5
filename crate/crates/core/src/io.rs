//! Plain-text persistence: dataset CSV, metadata sidecars and report
//! CSVs. Reports embed their full configuration as `#`-prefixed header
//! lines so every output file describes the run that produced it.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::clt::{MCReport, TracePoint};
use crate::domain::Dataset;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::search::SearchReport;
use crate::simgen::DatasetMeta;

/// Schema tag carried by every report file.
pub const REPORT_SCHEMA: &str = "mdr-report/1";

/// Writes a dataset as `x1,...,xn,y` rows of integer codes.
pub fn write_dataset_csv<W: Write>(w: &mut W, data: &Dataset) -> Result<()> {
    let n = data.factor_space().n();
    let mut header = String::new();
    for c in 1..=n {
        header.push_str(&format!("x{c},"));
    }
    header.push('y');
    writeln!(w, "{header}")?;
    for j in 1..=data.n_samples() {
        let mut line = String::new();
        for c in 1..=n {
            line.push_str(&format!("{},", data.factor(j, c)));
        }
        line.push_str(&data.response(j).to_string());
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Reads a dataset CSV back into a raw table; the header must be
/// `x1,...,xn,y`. Validation against spaces happens separately.
pub fn read_dataset_csv<Rd: BufRead>(r: Rd) -> Result<(usize, Vec<Vec<i64>>)> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty file".into()))??;
    let cols: Vec<&str> = header.trim_end().split(',').collect();
    if cols.len() < 2 || cols[cols.len() - 1] != "y" {
        return Err(Error::Parse(format!(
            "header {header:?} does not end in a y column"
        )));
    }
    let n = cols.len() - 1;
    for (i, c) in cols[..n].iter().enumerate() {
        if *c != format!("x{}", i + 1) {
            return Err(Error::Parse(format!(
                "header column {} is {:?}, expected x{}",
                i + 1,
                c,
                i + 1
            )));
        }
    }
    let mut rows = Vec::new();
    for (t, line) in lines.enumerate() {
        let line = line?;
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(n + 1);
        for field in trimmed.split(',') {
            row.push(field.trim().parse::<i64>().map_err(|_| {
                Error::Parse(format!("row {}: field {field:?} is not an integer", t + 1))
            })?);
        }
        if row.len() != n + 1 {
            return Err(Error::Parse(format!(
                "row {} has {} fields, expected {}",
                t + 1,
                row.len(),
                n + 1
            )));
        }
        rows.push(row);
    }
    Ok((n, rows))
}

/// Writes the metadata sidecar as pretty JSON.
pub fn write_meta(path: &Path, meta: &DatasetMeta) -> Result<()> {
    let json = serde_json::to_string_pretty(meta)
        .map_err(|e| Error::Parse(format!("metadata serialization: {e}")))?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

/// Reads a metadata sidecar.
pub fn read_meta(path: &Path) -> Result<DatasetMeta> {
    let text = std::fs::read_to_string(path)?;
    let meta: DatasetMeta = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("metadata parse: {e}")))?;
    if meta.schema != DatasetMeta::SCHEMA {
        return Err(Error::Parse(format!(
            "metadata schema {:?}, expected {:?}",
            meta.schema,
            DatasetMeta::SCHEMA
        )));
    }
    Ok(meta)
}

fn write_config_echo<W: Write>(w: &mut W, kind: &str, config: &serde_json::Value) -> Result<()> {
    writeln!(w, "# {REPORT_SCHEMA} {kind}")?;
    writeln!(w, "# config: {config}")?;
    Ok(())
}

/// Search report in the shape of the published tables: subset columns
/// `n1..nr`, then the estimate, ascending.
pub fn write_search_report_csv<W: Write, R: Real>(
    w: &mut W,
    report: &SearchReport<R>,
    config: &serde_json::Value,
) -> Result<()> {
    write_config_echo(w, "search", config)?;
    writeln!(w, "# total_evaluated: {}", report.total_evaluated)?;
    let r = report.config.subset_size;
    let mut header = String::new();
    for t in 1..=r {
        header.push_str(&format!("n{t},"));
    }
    header.push_str("epe");
    writeln!(w, "{header}")?;
    for row in &report.top {
        let mut line = String::new();
        for ix in row.beta.indices() {
            line.push_str(&format!("{ix},"));
        }
        line.push_str(&format!("{}", row.epe));
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Monte Carlo report: summary comment plus one row per replicate.
pub fn write_mc_report_csv<W: Write, R: Real>(
    w: &mut W,
    report: &MCReport<R>,
    config: &serde_json::Value,
) -> Result<()> {
    write_config_echo(w, "clt-check", config)?;
    writeln!(
        w,
        "# summary: {{\"replicates\":{},\"scale\":{},\"err_oracle\":{},\"mean\":{},\"variance\":{},\"ks\":{},\"degenerate_replicates\":{}}}",
        report.replicates.len(),
        report.scale,
        report.err_oracle,
        report.mean,
        report.variance,
        report.ks,
        report.degenerate_replicates
    )?;
    writeln!(w, "replicate,estimate,sigma2_hat,stat")?;
    for (i, rep) in report.replicates.iter().enumerate() {
        writeln!(w, "{i},{},{},{}", rep.estimate, rep.sigma2_hat, rep.stat)?;
    }
    Ok(())
}

/// Stabilization trace rows for external plotting.
pub fn write_trace_csv<W: Write, R: Real>(
    w: &mut W,
    points: &[TracePoint<R>],
    config: &serde_json::Value,
) -> Result<()> {
    write_config_echo(w, "trace", config)?;
    writeln!(w, "n,err_hat,err_oracle,sigma2_hat,ci_lo,ci_hi,degenerate")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            p.n_samples, p.err_hat, p.err_oracle, p.sigma2_hat, p.ci_lo, p.ci_hi, p.degenerate
        )?;
    }
    Ok(())
}
