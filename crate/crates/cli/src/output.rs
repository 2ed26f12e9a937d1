//! Buffered outputs, written only once a command has fully succeeded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use axisprobe::report::{json_string, InputHash, RunManifest};
use axisprobe::{Error, Result};
use serde::Serialize;

pub const MANIFEST: &str = "manifest.json";
pub const LOG_FILE: &str = "axisprobe.log";

#[derive(Default)]
pub struct Outputs {
    files: BTreeMap<String, String>,
    inputs: Vec<PathBuf>,
    pub family_size: Option<usize>,
    /// Some result was computed but is degenerate (skipped or undefined cells).
    pub degenerate: bool,
}

/// Data-file provenance. Unlike the manifest it carries no timestamp, so
/// identical runs give identical files.
#[derive(Serialize)]
pub struct Provenance<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub inputs: &'a [InputHash],
    pub family_size: Option<usize>,
    pub result: &'a T,
}

impl Outputs {
    pub fn input(&mut self, p: impl AsRef<Path>) {
        let p = p.as_ref().to_path_buf();
        if !self.inputs.contains(&p) {
            self.inputs.push(p);
        }
    }

    pub fn add(&mut self, name: impl Into<String>, content: String) {
        self.files.insert(name.into(), content);
    }

    pub fn hashes(&self) -> Result<Vec<InputHash>> {
        let mut inputs: Vec<PathBuf> = Vec::new();
        for p in &self.inputs {
            if p.is_dir() {
                let mut files = Vec::new();
                collect_files(p, &mut files)?;
                files.sort();
                inputs.extend(files);
            } else {
                inputs.push(p.clone());
            }
        }
        inputs.iter().map(InputHash::of).collect()
    }

    /// JSON document wrapping `result` with provenance.
    pub fn add_json<T: Serialize>(&mut self, name: &str, seed: u64, result: &T) -> Result<()> {
        let hashes = self.hashes()?;
        let doc = Provenance {
            tool: "axisprobe",
            version: env!("CARGO_PKG_VERSION"),
            seed,
            inputs: &hashes,
            family_size: self.family_size,
            result,
        };
        self.add(name, json_string(&doc)?);
        Ok(())
    }

    pub fn commit(self, dir: &Path, subcommand: &str, seed: u64, log: String) -> Result<()> {
        let manifest = RunManifest {
            tool: "axisprobe".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command_line: std::env::args().collect(),
            subcommand: subcommand.into(),
            inputs: self.hashes()?,
            seed,
            family_size: self.family_size,
            outputs: self.files.keys().cloned().collect(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        };
        let manifest = json_string(&manifest)?;
        fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
        let write = |name: &str, content: &str| {
            let p = dir.join(name);
            fs::write(&p, content).map_err(|e| Error::Io { path: p, source: e })
        };
        for (name, content) in &self.files {
            write(name, content)?;
        }
        write(MANIFEST, &manifest)?;
        write(LOG_FILE, &log)
    }
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let rd = fs::read_dir(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    for e in rd {
        let p = e
            .map_err(|e| Error::Io {
                path: dir.to_path_buf(),
                source: e,
            })?
            .path();
        if p.is_dir() {
            collect_files(&p, out)?;
        } else {
            out.push(p);
        }
    }
    Ok(())
}
