//! Result tables and their CSV/JSON renderings. Output files carry no
//! timing information so that equal configurations give equal bytes.

use std::fmt::Write;

use serde::Serialize;

pub const TOOL: &str = "noisy-oracle";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => real(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
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

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// 17 significant digits, `.` separator.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    /// Three-standard-error half width, when the metric is an estimate.
    pub half_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub seed: u64,
    pub config: Vec<(String, String)>,
    pub metrics: Vec<Metric>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl RunResult {
    pub fn new(experiment: &str, seed: u64, config: Vec<(String, String)>, columns: &[&str]) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            experiment: experiment.to_string(),
            seed,
            config,
            metrics: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: &str, value: f64, half_width: Option<f64>) -> &mut Self {
        self.metrics.push(Metric {
            name: name.to_string(),
            value,
            half_width,
        });
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> &mut Self {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
        self
    }

    pub fn get_metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    /// Value of `column` in row `row`.
    pub fn cell(&self, row: usize, column: &str) -> Option<&Cell> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows.get(row)?.get(c)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("# tool: {} {}", self.tool, self.version));
        line(format!("# experiment: {}", self.experiment));
        line(format!("# seed: {}", self.seed));
        for (k, v) in &self.config {
            line(format!("# param {k} = {v}"));
        }
        for m in &self.metrics {
            let mut s = format!("# metric {} = {}", m.name, real(m.value));
            if let Some(h) = m.half_width {
                write!(s, " +- {}", real(h)).expect("writing to a String");
            }
            line(s);
        }
        line(self.columns.join(","));
        for row in &self.rows {
            line(row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result is serialisable");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}
