//! Reports: a config echo, rows sharing one column set, and a summary.
//!
//! NDJSON output is one `config` record, one `row` record per row and one
//! `summary` record. CSV output is `# key=value` comment lines for the config,
//! a header, the rows, then `# key=value` comment lines for the summary.

use serde_json::Value;
use std::io::{self, Write};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    NonConvergence,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NonConvergence => "NONCONVERGENCE",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::NonConvergence => 3,
        }
    }
}

pub type Fields = Vec<(&'static str, Value)>;

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Fields,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Fields,
    pub status: Status,
    pub wall_time: Option<f64>,
}

impl Report {
    pub fn new(command: &'static str, config: Fields, columns: &[&'static str]) -> Self {
        Report {
            command,
            config,
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: Vec::new(),
            status: Status::Pass,
            wall_time: None,
        }
    }

    /// Appends a row; a `pass` column set to `false` marks the report failed.
    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        if let Some(i) = self.columns.iter().position(|c| *c == "pass") {
            if row[i] == Value::Bool(false) {
                self.fail();
            }
        }
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &'static str, value: impl Into<Value>) {
        self.summary.push((key, value.into()));
    }

    /// Records a verdict in the summary and folds it into the status.
    pub fn verdict(&mut self, key: &'static str, pass: bool) {
        self.note(key, pass);
        if !pass {
            self.fail();
        }
    }

    pub fn fail(&mut self) {
        self.status = self.status.max(Status::Fail);
    }

    pub fn nonconvergence(&mut self) {
        self.status = Status::NonConvergence;
    }

    fn header(&self) -> Fields {
        let mut out: Fields = vec![
            ("schema_version", SCHEMA_VERSION.into()),
            ("command", self.command.into()),
        ];
        out.extend(self.config.iter().cloned());
        out
    }

    fn footer(&self) -> Fields {
        let mut out = self.summary.clone();
        out.push(("rows", self.rows.len().into()));
        out.push(("status", self.status.label().into()));
        if let Some(t) = self.wall_time {
            out.push(("wall_time_s", num(t)));
        }
        out
    }

    pub fn write_json(&self, out: &mut impl Write) -> io::Result<()> {
        let mut config = vec![("record", Value::from("config"))];
        config.extend(self.header());
        write_object(out, &config)?;
        for row in &self.rows {
            let mut fields = vec![("record", Value::from("row"))];
            fields.extend(self.columns.iter().copied().zip(row.iter().cloned()));
            write_object(out, &fields)?;
        }
        let mut summary = vec![("record", Value::from("summary"))];
        summary.extend(self.footer());
        write_object(out, &summary)
    }

    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        for (k, v) in self.header() {
            writeln!(out, "# {k}={}", plain(&v))?;
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(plain))?;
        }
        out.write_all(&w.into_inner().map_err(|e| e.into_error())?)?;
        for (k, v) in self.footer() {
            writeln!(out, "# {k}={}", plain(&v))?;
        }
        Ok(())
    }
}

/// A float as JSON; non-finite values become strings so nothing is lost.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(x.to_string()))
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn write_object(out: &mut impl Write, fields: &[(&'static str, Value)]) -> io::Result<()> {
    out.write_all(b"{")?;
    for (i, (k, v)) in fields.iter().enumerate() {
        if i > 0 {
            out.write_all(b",")?;
        }
        write!(out, "{}:{}", Value::from(*k), v)?;
    }
    out.write_all(b"}\n")
}
