//! Run directory: CSV files, the echoed config and the manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;

pub const MANIFEST_SCHEMA: u32 = 1;
pub const CSV_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub schema_version: u32,
    pub columns: Vec<String>,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub threads: usize,
    pub config: RunConfig,
    pub seeds: Vec<u64>,
    pub tolerances: serde_json::Value,
    pub files: Vec<FileEntry>,
    pub timings: Vec<Timing>,
    pub summary: serde_json::Value,
    pub assertions: Vec<Assertion>,
    pub notes: Vec<String>,
    pub pass: bool,
}

pub struct Run {
    dir: PathBuf,
    pub manifest: Manifest,
    clock: Instant,
}

impl Run {
    pub fn create(dir: &Path, subcommand: &str, config: &RunConfig, threads: usize) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("config.toml"), config.to_toml()?)?;
        Ok(Run {
            dir: dir.to_path_buf(),
            manifest: Manifest {
                schema_version: MANIFEST_SCHEMA,
                tool: "qergo",
                version: env!("CARGO_PKG_VERSION"),
                subcommand: subcommand.to_string(),
                threads,
                config: config.clone(),
                seeds: Vec::new(),
                tolerances: serde_json::Value::Null,
                files: Vec::new(),
                timings: Vec::new(),
                summary: serde_json::Value::Null,
                assertions: Vec::new(),
                notes: Vec::new(),
                pass: true,
            },
            clock: Instant::now(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Record the time since the previous stage.
    pub fn stage(&mut self, name: &str) {
        self.manifest.timings.push(Timing {
            stage: name.to_string(),
            seconds: self.clock.elapsed().as_secs_f64(),
        });
        self.clock = Instant::now();
    }

    pub fn write_csv<R: Serialize>(&mut self, name: &str, columns: &[&str], rows: &[R]) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(self.path(name))?;
        w.write_record(columns)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        self.manifest.files.push(FileEntry {
            name: name.to_string(),
            schema_version: CSV_SCHEMA,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: rows.len(),
        });
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        std::fs::write(self.path(name), text)?;
        Ok(())
    }

    pub fn at_most(&mut self, name: &str, value: f64, bound: f64) -> bool {
        self.assert(name, value, bound, "<=", value <= bound)
    }

    pub fn at_least(&mut self, name: &str, value: f64, bound: f64) -> bool {
        self.assert(name, value, bound, ">=", value >= bound)
    }

    fn assert(&mut self, name: &str, value: f64, bound: f64, relation: &'static str, pass: bool) -> bool {
        self.manifest.assertions.push(Assertion {
            name: name.to_string(),
            value,
            bound,
            relation,
            pass,
        });
        self.manifest.pass &= pass;
        pass
    }

    /// Write the manifest and print the assertion report.
    pub fn finish(mut self) -> Result<bool> {
        self.stage("finish");
        let text = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(self.path("manifest.json"), text + "\n")?;
        for a in &self.manifest.assertions {
            println!(
                "[{}] {}: {:.3e} {} {:.3e}",
                if a.pass { "PASS" } else { "FAIL" },
                a.name,
                a.value,
                a.relation,
                a.bound
            );
        }
        println!(
            "{} {} -> {}",
            self.manifest.subcommand,
            if self.manifest.pass { "passed" } else { "FAILED" },
            self.dir.display()
        );
        Ok(self.manifest.pass)
    }
}
