//! Writes CSV files and the run manifest that accompanies them.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::table::Table;

/// Provenance record written next to every set of CSVs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command_line: String,
    pub params_digest: String,
    pub seed: u64,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
}

/// Collects outputs for one command run.
pub struct Output {
    dir: PathBuf,
    started: Instant,
    seed: u64,
    digest: Sha256,
    outputs: Vec<String>,
    notes: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path, seed: u64) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            started: Instant::now(),
            seed,
            digest: Sha256::new(),
            outputs: Vec::new(),
            notes: Vec::new(),
        })
    }

    /// Feeds an input (a parameter digest, a grid, a flag) into the run digest.
    pub fn describe(&mut self, what: impl AsRef<str>) {
        self.digest.update(what.as_ref().as_bytes());
        self.digest.update(b"\n");
    }

    pub fn note(&mut self, note: impl Into<String>) {
        let note = note.into();
        if !self.notes.contains(&note) {
            self.notes.push(note);
        }
    }

    pub fn write_csv(&mut self, name: &str, table: &Table) -> Result<()> {
        let file = format!("{name}.csv");
        let path = self.dir.join(&file);
        fs::write(&path, table.to_csv()).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
        self.outputs.push(file);
        Ok(())
    }

    /// Writes `<name>.manifest.json` and returns the manifest.
    pub fn finish(self, name: &str) -> Result<RunManifest> {
        let manifest = RunManifest {
            command_line: std::env::args().collect::<Vec<_>>().join(" "),
            params_digest: self.digest.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect(),
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
            notes: self.notes,
        };
        let path = self.dir.join(format!("{name}.manifest.json"));
        let json = serde_json::to_string_pretty(&manifest)?;
        fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
        Ok(manifest)
    }
}
