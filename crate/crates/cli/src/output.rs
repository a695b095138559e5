use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Output directory plus the metadata stamped on every CSV.
pub struct Output {
    dir: PathBuf,
    seed: u64,
    config_hash: String,
}

impl Output {
    pub fn new(dir: &Path, seed: u64, config_hash: String) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output { dir: dir.to_path_buf(), seed, config_hash })
    }

    /// Writes `# seed=.. config_hash=..`, the header and the rows.
    pub fn csv(&self, name: &str, header: &str, rows: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let text = format!("# seed={} config_hash={}\n{header}\n{rows}", self.seed, self.config_hash);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// Same as [`Output::csv`] for a body whose first line is the header.
    pub fn csv_with_header(&self, name: &str, body: &str) -> Result<PathBuf> {
        let (header, rows) = body.split_once('\n').unwrap_or((body, ""));
        self.csv(name, header, rows)
    }

    pub fn text(&self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
