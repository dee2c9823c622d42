//! Result envelope: config echo, typed columns with units, rows, and
//! diagnostics. CSV and JSON forms are byte-deterministic for a given
//! config, and the JSON form round-trips losslessly (floats go through
//! shortest-round-trip formatting).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
        }
    }
}

/// One table cell: a float, or exact text (decimal big integers and flags).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub produced_by: String,
    pub command: String,
    /// Canonicalized parameter echo (sorted keys).
    pub params: BTreeMap<String, String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub diagnostics: BTreeMap<String, String>,
}

/// 17-significant-digit float formatting used across CSV and diagnostics.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResultEnvelope {
    pub fn new(command: &str, params: BTreeMap<String, String>) -> Self {
        ResultEnvelope {
            produced_by: format!("spinbath {}", env!("CARGO_PKG_VERSION")),
            command: command.into(),
            params,
            columns: Vec::new(),
            rows: Vec::new(),
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn push_diag(&mut self, key: &str, value: String) {
        self.diagnostics.insert(key.into(), value);
    }

    /// CSV with a `name(unit)` header, 17-significant-digit floats, LF
    /// endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{}({})", c.name, c.unit))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => fmt_f64(*x),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let env: ResultEnvelope = serde_json::from_str(text)?;
        for row in &env.rows {
            if row.len() != env.columns.len() {
                return Err(Error::Parse(format!(
                    "row has {} cells but {} columns declared",
                    row.len(),
                    env.columns.len()
                )));
            }
        }
        Ok(env)
    }
}
