//! Tabular output in CSV (with a `# key=value` metadata header) or JSON.

use crate::config::Format;
use crate::CliError;
use serde_json::{json, Map, Value};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(_) => Value::Null,
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }

    fn from_json(v: &Value) -> Result<Cell, CliError> {
        Ok(match v {
            Value::Null => Cell::Float(f64::NAN),
            Value::Bool(b) => Cell::Bool(*b),
            Value::Number(x) => match x.as_u64() {
                Some(u) => Cell::Int(u),
                None => Cell::Float(x.as_f64().ok_or_else(|| CliError::Input(format!("bad number {x}")))?),
            },
            Value::String(s) => Cell::Text(s.clone()),
            other => return Err(CliError::Input(format!("unexpected JSON cell {other}"))),
        })
    }

    fn from_csv(s: &str) -> Cell {
        if let Ok(u) = s.parse::<u64>() {
            return Cell::Int(u);
        }
        if let Ok(b) = s.parse::<bool>() {
            return Cell::Bool(b);
        }
        match s.parse::<f64>() {
            Ok(f) => Cell::Float(f),
            Err(_) => Cell::Text(s.to_string()),
        }
    }
}

/// 17 significant digits: round-trips every `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn split_csv_line(line: &str) -> Vec<String> {
    let mut out = vec![];
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', _) => quoted = !quoted,
            (',', false) => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    out.push(cur);
    out
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table { metadata: vec![], columns, rows: vec![] }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            s.push_str(&format!("# {k}={v}\n"));
        }
        s.push_str(&self.columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.iter().map(|c| csv_field(&c.as_text())).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let metadata: Map<String, Value> = self.metadata.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::to_json).collect())).collect();
        let doc = json!({ "metadata": metadata, "columns": self.columns, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("tables serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn parse_csv(text: &str) -> Result<Self, CliError> {
        let mut table = Table::default();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = loop {
            let Some(line) = lines.next() else {
                return Err(CliError::Input("CSV has no header row".into()));
            };
            match line.strip_prefix('#') {
                Some(rest) => {
                    if let Some((k, v)) = rest.trim().split_once('=') {
                        table.metadata.push((k.trim().to_string(), v.trim().to_string()));
                    }
                }
                None => break line,
            }
        };
        table.columns = split_csv_line(header);
        for line in lines {
            let row: Vec<Cell> = split_csv_line(line).iter().map(|s| Cell::from_csv(s)).collect();
            if row.len() != table.columns.len() {
                return Err(CliError::Input(format!("row has {} fields, header has {}", row.len(), table.columns.len())));
            }
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn parse_json(text: &str) -> Result<Self, CliError> {
        let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid JSON: {e}")))?;
        let bad = |what: &str| CliError::Input(format!("JSON document lacks {what}"));
        let mut table = Table::default();
        for (k, v) in doc.get("metadata").and_then(Value::as_object).ok_or_else(|| bad("metadata"))? {
            table.metadata.push((k.clone(), v.as_str().map_or_else(|| v.to_string(), str::to_string)));
        }
        table.columns = doc
            .get("columns")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("columns"))?
            .iter()
            .map(|c| c.as_str().map(str::to_string).ok_or_else(|| bad("string column names")))
            .collect::<Result<_, _>>()?;
        for row in doc.get("rows").and_then(Value::as_array).ok_or_else(|| bad("rows"))? {
            let cells = row.as_array().ok_or_else(|| bad("array rows"))?;
            if cells.len() != table.columns.len() {
                return Err(CliError::Input(format!("row has {} fields, header has {}", cells.len(), table.columns.len())));
            }
            table.rows.push(cells.iter().map(Cell::from_json).collect::<Result<_, _>>()?);
        }
        Ok(table)
    }

    /// Reads a table, choosing the parser from the extension (`.json`) or
    /// the first non-blank character.
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        if is_json {
            Self::parse_json(&text)
        } else {
            Self::parse_csv(&text)
        }
    }
}
