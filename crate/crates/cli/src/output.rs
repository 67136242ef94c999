// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV formatting and the manifest-tracked file writer.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Format;
use crate::error::CliError;

/// Rows below this magnitude count as zero and are left out of sparse CSVs.
pub const ZERO_ROW: f64 = 1e-15;

const SIGNIFICANT: i32 = 12;

/// `%.12g`: 12 significant digits, trailing zeros removed, exponent form
/// outside `[1e-5, 1e12)`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (SIGNIFICANT - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT).contains(&exp) {
        let decimals = (SIGNIFICANT - 1 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Comma-separated table with a fixed header.
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { text: format!("{}\n", header.join(",")), columns: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[derive(Debug, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub started_at: String,
    pub finished_at: String,
    pub files: Vec<FileEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Writes every artifact of a run and records it for the manifest.
pub struct OutputWriter {
    dir: PathBuf,
    formats: Vec<Format>,
    manifest: RunManifest,
}

impl OutputWriter {
    pub fn create(
        dir: &Path,
        formats: &[Format],
        command: &str,
        config_path: &Path,
        config_bytes: &[u8],
    ) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(OutputWriter {
            dir: dir.to_path_buf(),
            formats: formats.to_vec(),
            manifest: RunManifest {
                tool: "qwalk",
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                config: config_path.display().to_string(),
                config_sha256: sha256_hex(config_bytes),
                seed: None,
                started_at: now(),
                finished_at: String::new(),
                files: Vec::new(),
            },
        })
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.manifest.seed = Some(seed);
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.manifest.files.push(FileEntry { path: name.to_string(), sha256: sha256_hex(contents), bytes: contents.len() });
        Ok(path)
    }

    /// Writes `name` if CSV output is enabled.
    pub fn csv(&mut self, name: &str, csv: Csv) -> Result<Option<PathBuf>, CliError> {
        if !self.wants(Format::Csv) {
            return Ok(None);
        }
        self.write(name, csv.into_string().as_bytes()).map(Some)
    }

    /// Writes `name` if SVG output is enabled. `render` runs only then.
    pub fn svg(&mut self, name: &str, render: impl FnOnce() -> String) -> Result<Option<PathBuf>, CliError> {
        if !self.wants(Format::Svg) {
            return Ok(None);
        }
        self.write(name, render().as_bytes()).map(Some)
    }

    pub fn files(&self) -> impl Iterator<Item = PathBuf> + '_ {
        self.manifest.files.iter().map(|f| self.dir.join(&f.path))
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.manifest.finished_at = now();
        let json = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, json + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}
