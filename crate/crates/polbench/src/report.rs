//! Output rendering shared by every CLI command: one tabular record with a
//! metadata preamble, serialized either as commented CSV or as a JSON
//! document. Rendering is deterministic — equal records produce identical
//! bytes — so repeated runs with the same inputs can be diffed directly.

use serde_json::{json, Map, Value};

pub(crate) const SCHEMA_VERSION: &str = "1";

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Cell {
    F(f64),
    S(&'static str),
}

/// One metadata value in the record preamble.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Meta {
    F(f64),
    U(u64),
    S(String),
    /// A short numeric list, e.g. the four analyzer angles.
    List(Vec<f64>),
    /// An inclusive range.
    Pair(f64, f64),
}

impl Meta {
    fn csv(&self) -> String {
        match self {
            Meta::F(x) => x.to_string(),
            Meta::U(n) => n.to_string(),
            Meta::S(s) => s.clone(),
            Meta::List(v) => v
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
            Meta::Pair(lo, hi) => format!("{lo},{hi}"),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Meta::F(x) => json!(x),
            Meta::U(n) => json!(n),
            Meta::S(s) => json!(s),
            Meta::List(v) => json!(v),
            Meta::Pair(lo, hi) => json!([lo, hi]),
        }
    }
}

/// A rendered command result: parameters that describe the run, the
/// conventions it relied on, and the table itself.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct OutputRecord {
    pub command: &'static str,
    /// Run parameters in presentation order.
    pub params: Vec<(&'static str, Meta)>,
    /// Conventions a reader needs to interpret the numbers.
    pub decisions: Vec<(&'static str, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputRecord {
    /// Every numeric cell and parameter is finite. Checked before emitting
    /// so that a broken invariant aborts the run instead of printing NaNs.
    pub fn is_finite(&self) -> bool {
        let meta_ok = self.params.iter().all(|(_, m)| match m {
            Meta::F(x) => x.is_finite(),
            Meta::List(v) => v.iter().all(|x| x.is_finite()),
            Meta::Pair(lo, hi) => lo.is_finite() && hi.is_finite(),
            Meta::U(_) | Meta::S(_) => true,
        });
        meta_ok
            && self.rows.iter().flatten().all(|c| match c {
                Cell::F(x) => x.is_finite(),
                Cell::S(_) => true,
            })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# schema_version: {SCHEMA_VERSION}\n"));
        out.push_str(&format!("# command: {}\n", self.command));
        for (key, value) in &self.params {
            out.push_str(&format!("# {key}: {}\n", value.csv()));
        }
        for (key, text) in &self.decisions {
            out.push_str(&format!("# {key}: {text}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line = row
                .iter()
                .map(|cell| match cell {
                    Cell::F(x) => x.to_string(),
                    Cell::S(s) => (*s).to_owned(),
                })
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let params: Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| ((*k).to_owned(), v.to_json()))
            .collect();
        let decisions: Map<String, Value> = self
            .decisions
            .iter()
            .map(|(k, v)| ((*k).to_owned(), json!(v)))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|cell| match cell {
                            Cell::F(x) => json!(x),
                            Cell::S(s) => json!(s),
                        })
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "params": params,
            "decisions": decisions,
            "columns": self.columns,
            "rows": rows,
        });
        let mut text =
            serde_json::to_string_pretty(&doc).expect("finite record serializes");
        text.push('\n');
        text
    }
}
