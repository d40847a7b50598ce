//! Report assembly and rendering: pretty text, RFC-4180-style CSV, and a
//! JSON envelope {inputs, outputs, meta}.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

/// Significant digits used when serializing numbers.
const JSON_SIG_DIGITS: usize = 10;
const PRETTY_SIG_DIGITS: usize = 6;

/// A float rounded for JSON output (10 significant digits).
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(format!("{x}"));
    }
    let rounded: f64 = format!("{:.*e}", JSON_SIG_DIGITS - 1, x).parse().unwrap();
    json!(rounded)
}

pub fn opt_num(x: Option<f64>) -> Value {
    match x {
        Some(v) => num(v),
        None => Value::Null,
    }
}

/// Human-oriented significant-digit formatting (no trailing zeros).
pub fn pretty_num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (PRETTY_SIG_DIGITS as i32 - 1 - mag).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.*e}", PRETTY_SIG_DIGITS - 1, x)
    }
}

fn value_pretty(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) => n.as_f64().map(pretty_num).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn value_csv(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => csv_escape(s),
        other => csv_escape(&other.to_string()),
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Pretty,
    Csv,
    Json,
}

/// Tabular part of a report.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

/// One command's result: echoed inputs, scalar outputs, optional table.
pub struct Report {
    pub command: &'static str,
    pub inputs: Vec<(&'static str, Value)>,
    pub values: Vec<(&'static str, Value)>,
    pub table: Option<Table>,
}

impl Report {
    pub fn render(&self, format: Format, runtime_ms: u128) -> String {
        match format {
            Format::Json => self.render_json(runtime_ms),
            Format::Csv => self.render_csv(),
            Format::Pretty => self.render_pretty(),
        }
    }

    fn render_json(&self, runtime_ms: u128) -> String {
        let mut inputs = Map::new();
        for (k, v) in &self.inputs {
            inputs.insert((*k).into(), v.clone());
        }
        let mut outputs = Map::new();
        for (k, v) in &self.values {
            outputs.insert((*k).into(), v.clone());
        }
        if let Some(table) = &self.table {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    for (h, v) in table.headers.iter().zip(row) {
                        obj.insert((*h).into(), v.clone());
                    }
                    Value::Object(obj)
                })
                .collect();
            outputs.insert("rows".into(), Value::Array(rows));
        }
        let doc = json!({
            "inputs": Value::Object(inputs),
            "outputs": Value::Object(outputs),
            "meta": {
                "command": self.command,
                "version": env!("CARGO_PKG_VERSION"),
                "runtime_ms": runtime_ms as u64,
            },
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        if let Some(table) = &self.table {
            out.push_str(&table.headers.join(","));
            out.push('\n');
            for row in &table.rows {
                let fields: Vec<String> = row.iter().map(value_csv).collect();
                out.push_str(&fields.join(","));
                out.push('\n');
            }
        } else {
            let headers: Vec<String> = self.values.iter().map(|(k, _)| k.to_string()).collect();
            let fields: Vec<String> = self.values.iter().map(|(_, v)| value_csv(v)).collect();
            out.push_str(&headers.join(","));
            out.push('\n');
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    fn render_pretty(&self) -> String {
        let mut out = String::new();
        if !self.inputs.is_empty() {
            let parts: Vec<String> = self
                .inputs
                .iter()
                .map(|(k, v)| format!("{k}={}", value_pretty(v)))
                .collect();
            out.push_str(&format!("{} [{}]\n", self.command, parts.join(", ")));
        } else {
            out.push_str(&format!("{}\n", self.command));
        }
        for (k, v) in &self.values {
            out.push_str(&format!("  {k} = {}\n", value_pretty(v)));
        }
        if let Some(table) = &self.table {
            let mut widths: Vec<usize> = table.headers.iter().map(|h| h.len()).collect();
            let rendered: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|row| row.iter().map(value_pretty).collect())
                .collect();
            for row in &rendered {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let fmt_row = |cells: &[String]| -> String {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            let header_cells: Vec<String> = table.headers.iter().map(|h| h.to_string()).collect();
            out.push_str(&fmt_row(&header_cells));
            out.push('\n');
            for row in &rendered {
                out.push_str(&fmt_row(row));
                out.push('\n');
            }
        }
        out
    }
}

/// Write the rendered report to `path` atomically (temp file + rename) or
/// to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension("tmp");
            {
                let mut f = fs::File::create(&tmp)?;
                f.write_all(text.as_bytes())?;
                f.sync_all()?;
            }
            fs::rename(&tmp, path)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_escape("plain"), "plain");
        assert_eq!(csv_escape("a,b"), "\"a,b\"");
        assert_eq!(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn json_numbers_carry_ten_significant_digits() {
        let v = num(0.123_456_789_012_345);
        assert_eq!(v.to_string(), "0.123456789");
        let v = num(2.828_427_124_746_190_3);
        assert_eq!(v.to_string(), "2.828427125");
    }

    #[test]
    fn pretty_numbers_carry_six() {
        assert_eq!(pretty_num(0.071_492_3), "0.0714923");
        assert_eq!(pretty_num(1.0), "1");
        assert_eq!(pretty_num(2.828_427_1), "2.82843");
    }
}
