use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = concat!("bbm ", env!("CARGO_PKG_VERSION"));

/// Written next to every report as `<name>.manifest.json`. The timestamp
/// lives only here so the report files themselves stay byte-identical
/// across runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, enough to replay the run.
    pub args: Vec<String>,
    pub params: serde_json::Value,
    pub tool_version: String,
    pub seed: u64,
    pub timestamp: String,
    pub outputs: Vec<String>,
}

pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)
            .with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, file: &str, contents: &str) -> Result<()> {
        let path = self.root.join(file);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
        self.written.push(file.to_string());
        Ok(())
    }

    pub fn finish(
        mut self,
        name: &str,
        command: &str,
        args: &[String],
        params: serde_json::Value,
        seed: u64,
    ) -> Result<()> {
        let manifest = RunManifest {
            command: command.to_string(),
            args: args.to_vec(),
            params,
            tool_version: TOOL_VERSION.to_string(),
            seed,
            timestamp: chrono::Utc::now().to_rfc3339(),
            outputs: std::mem::take(&mut self.written),
        };
        self.write(
            &format!("{name}.manifest.json"),
            &bbm_core::report::to_json(&manifest),
        )
    }
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
