//! Output plumbing: CSV with 17 significant digits, JSON documents, and the
//! `--out` redirection.

use dirac_bvp::linalg::C64;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

pub struct Sink {
    target: Option<PathBuf>,
}

impl Sink {
    pub fn new(out: Option<PathBuf>) -> Self {
        Self { target: out }
    }

    pub fn write(&self, content: &str) -> std::io::Result<()> {
        match &self.target {
            Some(path) => fs::write(path, content),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(content.as_bytes())
            }
        }
    }
}

/// 17 significant digits, '.' decimal separator.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex_json(z: C64) -> serde_json::Value {
    serde_json::json!({"re": z.re, "im": z.im})
}

pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { lines: vec![header.join(",")] }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    pub fn finish(self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}
