use std::fmt::Display;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

enum Line {
    Field(&'static str, String),
    Record(&'static str, String),
    Note(String),
    Map(String, String),
}

/// Command output, kept abstract until the format is known so that both
/// renderings carry the same content in the same order.
pub struct Report {
    lines: Vec<Line>,
    failure: Option<String>,
    checked: bool,
}

impl Report {
    pub fn new() -> Self {
        Report {
            lines: Vec::new(),
            failure: None,
            checked: false,
        }
    }

    /// `key: value` for humans, `key=value` for machines.
    pub fn field(&mut self, key: &'static str, value: impl Display) {
        self.lines.push(Line::Field(key, value.to_string()));
    }

    /// A bare value for humans, `key=value` for machines.
    pub fn record(&mut self, key: &'static str, value: impl Display) {
        self.lines.push(Line::Record(key, value.to_string()));
    }

    /// Human output only.
    pub fn note(&mut self, text: impl Into<String>) {
        self.lines.push(Line::Note(text.into()));
    }

    /// `x -> v` lines, rendered as `map.x=v` records for machines.
    pub fn map_lines(&mut self, text: &str) {
        for line in text.lines() {
            let (x, v) = line.split_once(" -> ").unwrap_or((line, ""));
            self.lines.push(Line::Map(x.to_string(), v.to_string()));
        }
    }

    /// Records the first failure; later ones are dropped.
    pub fn fail(&mut self, msg: impl Into<String>) {
        self.failure.get_or_insert_with(|| msg.into());
    }

    /// Marks the report as the outcome of a check, adding a result line.
    pub fn finish(mut self) -> Self {
        self.checked = true;
        self
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for line in &self.lines {
            let text = match (line, format) {
                (Line::Field(k, v), Format::Human) => format!("{k}: {v}"),
                (Line::Field(k, v) | Line::Record(k, v), Format::Machine) => format!("{k}={v}"),
                (Line::Record(_, v), Format::Human) => v.clone(),
                (Line::Note(t), Format::Human) => t.clone(),
                (Line::Note(_), Format::Machine) => continue,
                (Line::Map(x, v), Format::Human) => format!("{x} -> {v}"),
                (Line::Map(x, v), Format::Machine) => format!("map.{x}={v}"),
            };
            out.push_str(&text);
            out.push('\n');
        }
        if self.checked {
            match (&self.failure, format) {
                (None, Format::Human) => out.push_str("result: pass\n"),
                (None, Format::Machine) => out.push_str("result=pass\n"),
                (Some(f), Format::Human) => {
                    out.push_str("result: FAIL\ncounterexample:\n");
                    out.push_str(f);
                    out.push('\n');
                }
                (Some(f), Format::Machine) => {
                    out.push_str("result=fail\n");
                    out.push_str(&format!("counterexample={}\n", f.replace('\n', " | ")));
                }
            }
        }
        out
    }
}
