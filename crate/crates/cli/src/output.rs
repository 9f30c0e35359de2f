use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// `{:.16e}` (17 significant digits), `nan` for non-finite values.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".to_string()
    }
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        num(x)
    } else {
        "null".to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.replace([',', '\n', '\r'], ";"),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(x) => json_num(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => Value::String(s.clone()).to_string(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }
}

/// One rendered document; `suffix` distinguishes several files of one run.
#[derive(Clone, Debug)]
pub struct Document {
    pub suffix: Option<String>,
    pub text: String,
}

pub fn meta(command: &str, cfg: &RunConfig, extra: Value) -> Value {
    let mut m = json!({
        "tool": "susyphoton",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": cfg,
    });
    if let (Some(obj), Value::Object(more)) = (m.as_object_mut(), extra) {
        obj.extend(more);
    }
    m
}

pub fn render(meta: &Value, table: &Table, format: Format) -> String {
    match format {
        Format::Csv => render_csv(meta, table),
        Format::Json => render_json(meta, table),
    }
}

pub fn render_csv(meta: &Value, table: &Table) -> String {
    let mut out = format!("# {meta}\n{}\n", table.columns.join(","));
    for row in &table.rows {
        out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(meta: &Value, table: &Table) -> String {
    let cols: Vec<String> = table.columns.iter().map(|c| Value::String(c.to_string()).to_string()).collect();
    let rows: Vec<String> =
        table.rows.iter().map(|r| format!("[{}]", r.iter().map(Cell::json).collect::<Vec<_>>().join(","))).collect();
    format!("{{\"meta\":{meta},\"columns\":[{}],\"rows\":[{}]}}\n", cols.join(","), rows.join(","))
}

/// JSON array of numbers with the fixed float format.
pub fn json_array(xs: &[f64]) -> String {
    format!("[{}]", xs.iter().map(|&x| json_num(x)).collect::<Vec<_>>().join(","))
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable report") + "\n"
}

/// `out.csv` with suffix `k2_1` becomes `out_k2_1.csv`.
pub fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

pub fn emit(docs: &[Document], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let many = docs.len() > 1;
            for d in docs {
                let target = match (&d.suffix, many) {
                    (Some(s), true) => suffixed(path, s),
                    _ => path.to_path_buf(),
                };
                std::fs::write(&target, &d.text)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for d in docs {
                stdout.write_all(d.text.as_bytes())?;
            }
        }
    }
    Ok(())
}
