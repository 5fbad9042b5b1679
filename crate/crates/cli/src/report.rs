//! Reports and their three serializations.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Info,
    Unmet,
    Fail,
}

impl Status {
    pub fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Info => "info",
            Status::Unmet => "unmet",
            Status::Fail => "fail",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub subject: String,
    pub check: String,
    pub status: Status,
    pub detail: String,
}

/// Cells are preformatted strings; rationals are always `p/q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<Table>,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Structured,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), ..Default::default() }
    }

    pub fn verdict(&mut self, subject: &str, check: &str, status: Status, detail: impl Into<String>) {
        self.verdicts.push(Verdict { subject: subject.into(), check: check.into(), status, detail: detail.into() });
    }

    pub fn worst(&self) -> Option<Status> {
        self.verdicts.iter().map(|v| v.status).max()
    }

    /// 0 all-pass, 2 some check failed, 3 hypotheses unmet (and nothing failed).
    pub fn exit_code(&self) -> i32 {
        match self.worst() {
            Some(Status::Fail) => 2,
            Some(Status::Unmet) => 3,
            _ => 0,
        }
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Csv => self.to_csv(),
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
        }
    }

    pub fn parse_structured(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }

    fn to_text(&self) -> String {
        let mut out = format!("algebroidlab {}\n", self.command);
        if !self.verdicts.is_empty() {
            out.push('\n');
            for v in &self.verdicts {
                let _ = write!(out, "[{}] {}: {}", v.status.as_str(), v.subject, v.check);
                if !v.detail.is_empty() {
                    let _ = write!(out, " ({})", v.detail);
                }
                out.push('\n');
            }
        }
        for t in &self.tables {
            let _ = write!(out, "\n{}\n", t.name);
            let mut width: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
            for row in &t.rows {
                for (w, cell) in width.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells.iter().zip(&width).map(|(c, &w)| format!("{c:<w$}")).collect();
                format!("  {}\n", padded.join("  ").trim_end())
            };
            out.push_str(&line(&t.columns));
            for row in &t.rows {
                out.push_str(&line(row));
            }
        }
        if !self.witnesses.is_empty() {
            out.push_str("\nwitnesses\n");
            for w in &self.witnesses {
                let _ = writeln!(out, "  {w}");
            }
        }
        out
    }

    /// One record per verdict and per table row, each tagged with its
    /// section; every section starts with its own header record.
    fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        if !self.verdicts.is_empty() {
            w.write_record(["section", "subject", "check", "status", "detail"]).expect("in-memory");
            for v in &self.verdicts {
                w.write_record(["verdict", &v.subject, &v.check, v.status.as_str(), &v.detail]).expect("in-memory");
            }
        }
        for t in &self.tables {
            let head = std::iter::once("section").chain(t.columns.iter().map(String::as_str));
            w.write_record(head).expect("in-memory");
            for row in &t.rows {
                w.write_record(std::iter::once(t.name.as_str()).chain(row.iter().map(String::as_str)))
                    .expect("in-memory");
            }
        }
        for x in &self.witnesses {
            w.write_record(["witness", x]).expect("in-memory");
        }
        String::from_utf8(w.into_inner().expect("in-memory")).expect("utf-8 input")
    }
}
