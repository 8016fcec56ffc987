//! The run report every subcommand produces, and its JSON/CSV rendering.

use serde::Serialize;
use serde_json::{Map, Value};
use std::collections::BTreeMap;

/// Bulk rows emitted by `--csv`.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub params: Map<String, Value>,
    pub results: Map<String, Value>,
    pub residuals: BTreeMap<String, f64>,
    pub pass: bool,
    pub wall_time: Option<f64>,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            params: Map::new(),
            results: Map::new(),
            residuals: BTreeMap::new(),
            pass: false,
            wall_time: None,
            table: None,
        }
    }

    pub fn param(&mut self, k: &str, v: impl Serialize) -> &mut Self {
        self.params.insert(k.to_string(), to_value(v));
        self
    }

    pub fn result(&mut self, k: &str, v: impl Serialize) -> &mut Self {
        self.results.insert(k.to_string(), to_value(v));
        self
    }

    pub fn residual(&mut self, k: &str, v: f64) -> &mut Self {
        self.residuals.insert(k.to_string(), v);
        self
    }

    /// `pass` holds iff every residual is finite and within `tol`.
    pub fn judge(&mut self, tol: f64) {
        self.params.insert("tol".into(), to_value(tol));
        self.pass = self.residuals.values().all(|r| r.is_finite() && *r <= tol);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The bulk table if the command has one, otherwise residuals as
    /// `name,value` rows followed by the verdict.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
            }
            None => {
                w.write_record(["name", "value"])?;
                for (k, v) in &self.residuals {
                    w.write_record([k.as_str(), &v.to_string()])?;
                }
                w.write_record(["pass", &self.pass.to_string()])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}
