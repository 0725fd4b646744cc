//! Report envelopes and their JSON and CSV renderings.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::SCHEMA_VERSION;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Table {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub enum Body {
    /// Fields merged into the top-level report object.
    Document(Value),
    /// One JSON object per line after the envelope line.
    Lines(Vec<Value>),
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub body: Body,
    pub table: Table,
    /// False when the command ran but its checks failed.
    pub success: bool,
}

impl Report {
    pub fn document(
        command: &'static str,
        config: Value,
        body: impl Serialize,
        table: Table,
    ) -> CliResult<Self> {
        Ok(Report {
            command,
            config,
            body: Body::Document(serde_json::to_value(body)?),
            table,
            success: true,
        })
    }

    fn envelope(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!(self.command));
        m.insert("config".into(), self.config.clone());
        m
    }

    pub fn write_json(&self, out: &mut dyn Write) -> CliResult<()> {
        let mut env = self.envelope();
        match &self.body {
            Body::Document(v) => {
                if let Value::Object(fields) = v {
                    env.extend(fields.clone());
                } else {
                    env.insert("result".into(), v.clone());
                }
                serde_json::to_writer_pretty(&mut *out, &Value::Object(env))?;
                writeln!(out)?;
            }
            Body::Lines(lines) => {
                env.insert("lines".into(), json!(lines.len()));
                serde_json::to_writer(&mut *out, &Value::Object(env))?;
                writeln!(out)?;
                for l in lines {
                    serde_json::to_writer(&mut *out, l)?;
                    writeln!(out)?;
                }
            }
        }
        Ok(())
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.table.headers)?;
        for r in &self.table.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(CliError::Io)
    }
}

pub fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}
