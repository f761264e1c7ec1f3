//! CSV ingestion and output writers.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

/// Largest series a single segment may span, in samples.
const MAX_SPAN: i64 = 100_000_000;

/// One track: samples `t0..t0+len` with missing values flagged.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub name: String,
    pub t0: i64,
    pub values: Vec<f64>,
    pub missing: Vec<bool>,
}

/// Reads `t,value` or `segment,t,value` CSV. Empty values and skipped `t`
/// are missing; `t` must increase strictly within a segment.
pub fn read_series(path: &Path) -> Result<Vec<Segment>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let headers = rdr.headers().context("missing CSV header")?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (t_col, v_col) = match (col("t"), col("value")) {
        (Some(t), Some(v)) => (t, v),
        _ => bail!("CSV header must contain columns `t` and `value`"),
    };
    let s_col = col("segment");

    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<(i64, Option<f64>)>> = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| anyhow!("malformed CSV: {e}"))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).ok_or_else(|| anyhow!("line {line}: missing column"));
        let name = match s_col {
            Some(i) => field(i)?.to_string(),
            None => String::new(),
        };
        let t: i64 = field(t_col)?
            .parse()
            .map_err(|_| anyhow!("line {line}: `t` must be an integer, got {:?}", record.get(t_col).unwrap_or("")))?;
        let raw = field(v_col)?;
        let value = if raw.is_empty() {
            None
        } else {
            let v: f64 = raw.parse().map_err(|_| anyhow!("line {line}: cannot parse value {raw:?}"))?;
            if !v.is_finite() {
                bail!("line {line}: value must be finite");
            }
            Some(v)
        };
        let entry = rows.entry(name.clone()).or_insert_with(|| {
            order.push(name.clone());
            Vec::new()
        });
        if let Some(&(prev, _)) = entry.last() {
            if t <= prev {
                bail!("line {line}: `t` must increase within a segment ({t} after {prev})");
            }
        }
        entry.push((t, value));
    }
    if order.is_empty() {
        bail!("input has no data rows");
    }

    order
        .into_iter()
        .map(|name| {
            let rows = &rows[&name];
            let t0 = rows[0].0;
            let span = rows.last().unwrap().0 - t0 + 1;
            if span > MAX_SPAN {
                bail!("segment {name:?} spans {span} samples, more than {MAX_SPAN}");
            }
            let mut values = vec![0.0; span as usize];
            let mut missing = vec![true; span as usize];
            for &(t, v) in rows {
                if let Some(v) = v {
                    values[(t - t0) as usize] = v;
                    missing[(t - t0) as usize] = false;
                }
            }
            if missing.iter().all(|&m| m) {
                bail!("segment {name:?} has no values: all samples are missing");
            }
            Ok(Segment { name, t0, values, missing })
        })
        .collect()
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes a plain `t,value` series starting at `t = 0`.
pub fn write_series(path: &Path, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["t", "value"])?;
    for (t, v) in values.iter().enumerate() {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
