//! CSV tables, atomic file writes and generated plot scripts.

use std::io::Write;
use std::path::Path;

pub const CSV_SCHEMA: &str = "scslab-csv-1";

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// 17 significant digits, so values round-trip exactly.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

pub enum Cell {
    Float(f64),
    Int(i64),
    Flag(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Flag(b) => (if *b { "1" } else { "0" }).to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

pub struct CsvTable {
    pub kind: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(kind: &str, columns: &[&str]) -> Self {
        Self { kind: kind.to_string(), columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the {} schema", self.kind);
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = format!("# {CSV_SCHEMA} {}\n{}\n", self.kind, self.columns.join(","));
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::render).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

/// A matplotlib script plotting `ys` against `x` from the CSV next to it.
pub fn plot_script(csv_name: &str, x: &str, ys: &[&str], log_x: bool, log_y: bool, group: Option<&str>) -> String {
    let ys_list = ys.iter().map(|y| format!("{y:?}")).collect::<Vec<_>>().join(", ");
    let group_line = match group {
        Some(g) => format!("groups = sorted({{r[{g:?}] for r in rows}})"),
        None => "groups = [None]".to_string(),
    };
    let group_key = group.map(|g| format!("{g:?}")).unwrap_or_else(|| "None".to_string());
    format!(
        r##"import csv
import os
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, {csv_name:?})) as fh:
    rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))

{group_line}
fig, ax = plt.subplots()
for g in groups:
    sel = [r for r in rows if g is None or r[{group_key}] == g]
    xs = [float(r[{x:?}]) for r in sel]
    for col in [{ys_list}]:
        label = col if g is None else f"{{col}} ({group}={{g}})"
        ax.plot(xs, [float(r[col]) for r in sel], marker="o", label=label)
ax.set_xlabel({x:?})
{xscale}{yscale}ax.legend()
fig.savefig(os.path.join(here, {png:?}), dpi=150)
"##,
        group = group.unwrap_or(""),
        xscale = if log_x { "ax.set_xscale(\"log\")\n" } else { "" },
        yscale = if log_y { "ax.set_yscale(\"log\")\n" } else { "" },
        png = csv_name.replace(".csv", ".png"),
    )
}
