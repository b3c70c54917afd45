//! Output directory handling: JSON reports, CSV tables, manifest and timing.

use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::Context;
use serde::Serialize;
use standing_pulse::grid::fmt_f64;

use crate::config::RunConfig;

pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    command: &'a str,
    config_file: &'static str,
    config: &'a RunConfig,
    outputs: &'a [String],
}

#[derive(Serialize)]
struct Timing {
    wall_seconds: f64,
}

impl OutputDir {
    pub fn create(root: PathBuf) -> anyhow::Result<Self> {
        fs::create_dir_all(&root).with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self { root, written: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> anyhow::Result<()> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn text(&mut self, name: &str, text: &str) -> anyhow::Result<()> {
        self.write(name, text.as_bytes())
    }

    /// CSV with a header row and every number in the fixed 17-digit format.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> anyhow::Result<()> {
        let mut s = header.join(",");
        s.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        self.write(name, s.as_bytes())
    }

    /// Writes `config.json`, `manifest.json` and, apart from the deterministic
    /// files, `timing.json`. The output directory is left out of the recorded
    /// config so that reruns into other directories produce identical files.
    pub fn finish(mut self, command: &str, config: &RunConfig, elapsed: Duration) -> anyhow::Result<PathBuf> {
        let config = &RunConfig { output_dir: None, ..config.clone() };
        self.json("config.json", config)?;
        let mut outputs = self.written.clone();
        outputs.sort();
        let manifest = Manifest {
            tool: "pulse",
            version: env!("CARGO_PKG_VERSION"),
            core_version: standing_pulse::VERSION,
            command,
            config_file: "config.json",
            config,
            outputs: &outputs,
        };
        self.json("manifest.json", &manifest)?;
        self.json("timing.json", &Timing { wall_seconds: elapsed.as_secs_f64() })?;
        Ok(self.root)
    }
}

/// Prints to stdout, ignoring a closed pipe.
pub fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().write_all(text.as_bytes());
}
