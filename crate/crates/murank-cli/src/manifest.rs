//! Run manifests: a flat key = value record written next to every output
//! file, holding enough to reproduce the run bit-identically.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

pub struct Manifest {
    entries: Vec<(String, String)>,
    started: Instant,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Manifest {
            entries: Vec::new(),
            started: Instant::now(),
        };
        m.push("command", command);
        m.push("version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    /// Records the path and sha256 digest of an input file.
    pub fn push_input(&mut self, key: &str, path: &Path, bytes: &[u8]) {
        self.push(key, path.display());
        let digest = Sha256::digest(bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.push(&format!("{key}_sha256"), hex);
    }

    /// Writes `<out>.manifest` next to the output file.
    pub fn write_for(mut self, out: &Path) -> Result<()> {
        self.push("out", out.display());
        self.push("wall_time_ms", self.started.elapsed().as_millis());
        let mut text = String::new();
        for (key, value) in &self.entries {
            text.push_str(key);
            text.push_str(" = ");
            text.push_str(value);
            text.push('\n');
        }
        let path = manifest_path(out);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".manifest");
    PathBuf::from(name)
}
