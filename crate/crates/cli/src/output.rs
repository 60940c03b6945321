use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tmtrace::{Ball, Verdict};

use crate::config::{CommandKind, Format, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// A ball printed as a decimal midpoint and an upper bound on the radius.
#[derive(Clone, Debug, Serialize)]
pub struct Dec {
    pub value: String,
    pub radius: String,
}

impl Dec {
    pub fn new(b: &Ball, digits: usize) -> Self {
        let (value, radius) = b.to_decimal(digits);
        Dec { value, radius }
    }
}

/// Scientific notation for diagnostics that are plain floating-point estimates.
pub fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

#[derive(Serialize)]
pub struct Document<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: CommandKind,
    pub config: &'a RunConfig,
    pub verdict: Verdict,
    #[serde(flatten)]
    pub body: T,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> std::io::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Result of one subcommand, ready to be written in either format.
pub struct Output {
    pub verdict: Verdict,
    pub json: String,
    pub table: Table,
}

impl Output {
    pub fn new<T: Serialize>(config: &RunConfig, verdict: Verdict, body: T, table: Table) -> Self {
        let doc = Document {
            schema_version: SCHEMA_VERSION,
            command: config.command,
            config,
            verdict,
            body,
        };
        let json = serde_json::to_string_pretty(&doc).expect("documents serialize");
        Output {
            verdict,
            json,
            table,
        }
    }

    pub fn render(&self, format: Format) -> std::io::Result<String> {
        match format {
            Format::Json => Ok(format!("{}\n", self.json)),
            Format::Csv => self.table.to_csv(),
        }
    }

    pub fn write(&self, format: Format, path: Option<&Path>) -> std::io::Result<()> {
        let text = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}
