//! Scenario outcomes and their on-disk form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use uai_core::Prob;

use crate::claims;

/// Everything a scenario produced. File contents are deterministic; only the
/// first line of the summary carries run metadata.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub scenario: String,
    /// `(file name, contents)` in emission order.
    pub files: Vec<(String, String)>,
    pub summary: Vec<String>,
    /// Invariant failures where none were expected.
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn new(scenario: &str) -> Self {
        Outcome { scenario: scenario.to_string(), ..Default::default() }
    }

    pub fn file(&mut self, name: &str, csv: Csv) {
        self.files.push((name.to_string(), csv.finish()));
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    pub fn violation(&mut self, line: impl Into<String>) {
        self.violations.push(line.into());
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    /// The summary body, without the metadata header line.
    pub fn summary_body(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {}", self.scenario);
        let _ = writeln!(out, "claims exercised:");
        for c in claims::claims_for(&self.scenario) {
            let _ = writeln!(out, "  {c}: {}", claims::describe(c).unwrap_or(""));
        }
        let _ = writeln!(out, "results:");
        for line in &self.summary {
            let _ = writeln!(out, "  {line}");
        }
        if self.violations.is_empty() {
            let _ = writeln!(out, "violations: none");
        } else {
            let _ = writeln!(out, "violations: {}", self.violations.len());
            for v in &self.violations {
                let _ = writeln!(out, "  {v}");
            }
        }
        let _ = writeln!(out, "files:");
        for (name, _) in &self.files {
            let _ = writeln!(out, "  {name}");
        }
        out
    }

    /// Writes every file plus `summary.txt` into `dir`.
    pub fn write(&self, dir: &Path, header: &str) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, contents) in &self.files {
            let path = dir.join(name);
            fs::write(&path, contents)?;
            written.push(path);
        }
        let path = dir.join("summary.txt");
        fs::write(&path, format!("# {header}\n{}", self.summary_body()))?;
        written.push(path);
        Ok(written)
    }
}

/// Minimal CSV builder; fields never contain commas or quotes.
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut out = header.join(",");
        out.push('\n');
        Csv { out }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        let line: Vec<&str> = fields.iter().map(|f| f.as_ref()).collect();
        self.out.push_str(&line.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub fn frac(p: &Prob) -> String {
    p.to_string()
}

/// Float rendering for reports only.
pub fn float(p: &Prob) -> String {
    format!("{:.9e}", p.to_f64())
}

pub fn witness(s: &str) -> String {
    if s.is_empty() {
        "ε".into()
    } else {
        s.to_string()
    }
}
