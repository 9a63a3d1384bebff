//! Run directories `<out>/<command>-NNN`.
//!
//! Each run writes its canonical configuration, its artifacts and a
//! `manifest.json` with the SHA-256 of every artifact. Wall-clock times go to
//! `timings.json`, which the manifest does not cover, so identical inputs give
//! identical manifests. Files are made read-only when the run is finished.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config_version: String,
    pub status: String,
    pub exit_code: i32,
    pub files: Vec<FileEntry>,
}

/// A finished run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub wall_clock: f64,
}

#[derive(Debug)]
pub struct RunDir {
    dir: PathBuf,
    command: String,
    files: BTreeMap<String, FileEntry>,
    timings: BTreeMap<String, f64>,
    started: Instant,
}

impl RunDir {
    /// Creates the next free `<out>/<command>-NNN`.
    pub fn create(out: &Path, command: &str) -> Result<Self> {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        let mut next = 1 + fs::read_dir(out)?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                name.strip_prefix(command)?.strip_prefix('-')?.parse::<u32>().ok()
            })
            .max()
            .unwrap_or(0);
        loop {
            let dir = out.join(format!("{command}-{next:03}"));
            match fs::create_dir(&dir) {
                Ok(()) => {
                    return Ok(Self {
                        dir,
                        command: command.to_string(),
                        files: BTreeMap::new(),
                        timings: BTreeMap::new(),
                        started: Instant::now(),
                    })
                }
                Err(e) if e.kind() == io::ErrorKind::AlreadyExists => next += 1,
                Err(e) => return Err(e).with_context(|| format!("creating {}", dir.display())),
            }
        }
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        f.write_all(bytes)?;
        self.files.insert(
            name.to_string(),
            FileEntry { name: name.to_string(), sha256: hex::encode(Sha256::digest(bytes)), bytes: bytes.len() as u64 },
        );
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write_bytes(name, s.as_bytes())
    }

    pub fn write_table(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
        self.write_bytes(name, &bytes)
    }

    /// Writes rows of numbers; floats use the shortest round-trip form.
    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
        self.write_table(name, header, rows.into_iter().map(|r| r.iter().map(f64::to_string).collect()))
    }

    pub fn record_time(&mut self, label: &str, seconds: f64) {
        self.timings.insert(label.to_string(), seconds);
    }

    /// Writes `timings.json` and `manifest.json` and freezes the directory.
    pub fn finish(mut self, config_version: &str, status: &str, exit_code: i32) -> Result<RunRecord> {
        let wall_clock = self.started.elapsed().as_secs_f64();
        self.timings.insert("wall_clock".into(), wall_clock);
        let timings = serde_json::to_string_pretty(&self.timings)? + "\n";
        fs::write(self.dir.join("timings.json"), timings)?;
        let manifest = Manifest {
            command: self.command.clone(),
            config_version: config_version.to_string(),
            status: status.to_string(),
            exit_code,
            files: self.files.values().cloned().collect(),
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(self.dir.join("manifest.json"), text)?;
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            let mut perm = fs::metadata(&path)?.permissions();
            perm.set_readonly(true);
            fs::set_permissions(&path, perm)?;
        }
        Ok(RunRecord { dir: self.dir, manifest, wall_clock })
    }
}

/// Recomputes the hashes of a finished run and compares them with its manifest.
pub fn check_manifest(dir: &Path) -> Result<bool> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    for f in &manifest.files {
        let bytes = fs::read(dir.join(&f.name))?;
        if hex::encode(Sha256::digest(&bytes)) != f.sha256 {
            return Ok(false);
        }
    }
    Ok(true)
}
