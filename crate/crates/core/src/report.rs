//! Structured reports rendered as deterministic text.
//!
//! A report is an ordered list of named sections, each an ordered list of
//! key-value rows. The machine rendering is line-oriented `key=value` text
//! with blank-line-separated sections, safe to diff and parse; the human
//! rendering is indented. Both are byte-stable for identical inputs.

use std::fmt::Display;
use std::fmt::Write as _;

/// Output style for [`Report::render`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Human,
    Machine,
}

impl ReportFormat {
    /// Parses a format name as used on the command line.
    pub fn from_name(name: &str) -> Option<ReportFormat> {
        match name {
            "human" => Some(ReportFormat::Human),
            "machine" => Some(ReportFormat::Machine),
            _ => None,
        }
    }
}

/// Named sections of key-value rows.
#[derive(Debug, Clone, Default)]
pub struct Report {
    sections: Vec<(String, Vec<(String, String)>)>,
}

fn sanitize(s: String) -> String {
    if s.contains(['\n', '\r']) {
        s.replace(['\n', '\r'], " ")
    } else {
        s
    }
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    /// Starts a new section; following [`Report::kv`] calls append to it.
    pub fn section(&mut self, name: impl Into<String>) -> &mut Report {
        self.sections.push((sanitize(name.into()), Vec::new()));
        self
    }

    /// Appends a row to the current section.
    pub fn kv(&mut self, key: impl Into<String>, value: impl Display) -> &mut Report {
        let row = (sanitize(key.into()), sanitize(value.to_string()));
        self.sections.last_mut().expect("a section is open").1.push(row);
        self
    }

    pub fn render(&self, format: ReportFormat) -> String {
        let mut out = String::new();
        for (i, (name, rows)) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            match format {
                ReportFormat::Machine => {
                    writeln!(out, "section={name}").expect("writing to a string");
                    for (k, v) in rows {
                        writeln!(out, "{k}={v}").expect("writing to a string");
                    }
                }
                ReportFormat::Human => {
                    writeln!(out, "[{name}]").expect("writing to a string");
                    for (k, v) in rows {
                        writeln!(out, "  {k} = {v}").expect("writing to a string");
                    }
                }
            }
        }
        out
    }
}
