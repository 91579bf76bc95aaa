use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use super::{SweepTable, Trace};
use crate::error::Result;

pub const SWEEP_HEADER: [&str; 5] = ["T", "regret_final", "move_final", "jumps", "runtime_ms"];

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trace_header(dim: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((0..dim).map(|i| format!("x{i}")));
    h.extend(
        ["f_x", "v_t", "move_inc", "move_cum", "F_t", "regret_cum", "kind", "phase"]
            .iter()
            .map(|s| s.to_string()),
    );
    h
}

fn trace_rows(trace: &Trace) -> Vec<Vec<String>> {
    trace
        .records
        .iter()
        .map(|r| {
            let mut row = vec![r.t.to_string()];
            row.extend(r.x.coords().iter().map(|c| num(*c)));
            row.extend([r.f_x, r.v_t, r.move_inc, r.move_cum, r.f_cum, r.regret_cum].map(num));
            row.push(r.kind.as_str().to_string());
            row.push(r.phase.to_string());
            row
        })
        .collect()
}

fn sweep_rows(table: &SweepTable) -> Vec<Vec<String>> {
    table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.horizon.to_string(),
                num(r.regret_final),
                num(r.move_final),
                r.jumps.to_string(),
                num(r.runtime_ms),
            ]
        })
        .collect()
}

/// Anything that can be written as one CSV table.
pub trait Tabular {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;
}

impl Tabular for Trace {
    fn header(&self) -> Vec<String> {
        trace_header(self.dim())
    }

    fn rows(&self) -> Vec<Vec<String>> {
        trace_rows(self)
    }
}

impl Tabular for SweepTable {
    fn header(&self) -> Vec<String> {
        SWEEP_HEADER.iter().map(|s| s.to_string()).collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        sweep_rows(self)
    }
}

/// Writes a header plus one row per record; floats use 17 significant digits.
pub fn emit_csv<T: Tabular + ?Sized>(data: &T, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(data.header())?;
    for row in data.rows() {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON array of objects keyed by the CSV column names.
pub fn emit_json<T: Tabular + ?Sized>(data: &T, path: &Path) -> Result<()> {
    let header = data.header();
    let rows: Vec<Value> = data
        .rows()
        .into_iter()
        .map(|row| {
            let obj: Map<String, Value> = header
                .iter()
                .zip(row)
                .map(|(k, v)| {
                    let val = match v.parse::<f64>() {
                        Ok(x) if k != "kind" => serde_json::Number::from_f64(x).map_or(Value::String(v), Value::Number),
                        _ => Value::String(v),
                    };
                    (k.clone(), val)
                })
                .collect();
            Value::Object(obj)
        })
        .collect();
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, &rows)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}
