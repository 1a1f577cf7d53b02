use std::fs;
use std::path::{Path, PathBuf};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult};

/// Output directory of one command invocation.
pub struct RunDir {
    pub path: PathBuf,
}

impl RunDir {
    /// Creates `<out>/<UTC timestamp>-seed<N>` (suffixed on collision) and
    /// writes the effective config into it.
    pub fn create(config: &PipelineConfig) -> CliResult<Self> {
        let out = &config.paths.out;
        fs::create_dir_all(out).map_err(|e| CliError::input(format!("cannot create {}: {e}", out.display())))?;
        let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
        let base = format!("{stamp}-seed{}", config.seed);
        let mut n = 0;
        let path = loop {
            let name = if n == 0 { base.clone() } else { format!("{base}-{n}") };
            let candidate = out.join(name);
            match fs::create_dir(&candidate) {
                Ok(()) => break candidate,
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => n += 1,
                Err(e) => return Err(CliError::input(format!("cannot create {}: {e}", candidate.display()))),
            }
        };
        let run = RunDir { path };
        run.write("config.toml", config.to_toml())?;
        eprintln!("run directory: {}", run.path.display());
        Ok(run)
    }

    pub fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> CliResult<PathBuf> {
        let path = self.path.join(name);
        fs::write(&path, contents).map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.path.join(name)
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

/// Serializes each item on its own line.
pub fn jsonl<T: serde::Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("record serializes"));
        out.push('\n');
    }
    out
}
