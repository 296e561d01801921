use crate::config::RunConfig;
use crate::curves::CurveTable;
use crate::error::{CliError, Result};
use serde_json::{json, Map, Value};
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

/// Scientific notation with 17 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn curves_csv(table: &CurveTable) -> String {
    let mut out = String::from("M");
    for c in &table.columns {
        out.push(',');
        out.push_str(&c.column());
    }
    out.push('\n');
    for (m, row) in table.m.iter().zip(&table.rows) {
        write!(out, "{m}").unwrap();
        for x in row {
            out.push(',');
            out.push_str(&format_value(*x));
        }
        out.push('\n');
    }
    out
}

pub fn params_json(cfg: &RunConfig) -> Value {
    json!({ "n_s": cfg.n_s, "n_b": cfg.n_b, "kappa": cfg.kappa })
}

pub fn curves_json(cfg: &RunConfig, table: &CurveTable) -> Value {
    let rows: Vec<Value> = table
        .m
        .iter()
        .zip(&table.rows)
        .map(|(m, row)| {
            let mut obj = Map::new();
            obj.insert("M".into(), json!(m));
            for (c, x) in table.columns.iter().zip(row) {
                obj.insert(c.column(), json!(x));
            }
            Value::Object(obj)
        })
        .collect();
    json!({
        "params": params_json(cfg),
        "columns": table.columns.iter().map(|c| c.column()).collect::<Vec<_>>(),
        "qcb_exponents": { "tmsv": table.qcb_tmsv_exponent, "coherent": table.qcb_coherent_exponent },
        "rows": rows,
    })
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}
