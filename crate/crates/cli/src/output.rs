use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::RunConfig;

/// Writes run artifacts into one directory, stamping each with the config hash.
pub struct Output {
    dir: PathBuf,
    hash: String,
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    config_hash: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

impl Output {
    pub fn create(dir: &Path, config: &RunConfig) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        let out = Self {
            dir: dir.to_path_buf(),
            hash: config.hash(),
        };
        out.json("config.resolved.json", config)?;
        Ok(out)
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn json<T: Serialize>(&self, name: &str, body: &T) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(
            &mut w,
            &Stamped {
                config_hash: &self.hash,
                body,
            },
        )?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(path)
    }

    /// CSV writer whose first line is `# config_sha256: <hash>`.
    pub fn csv(&self, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "# config_sha256: {}", self.hash)?;
        Ok(csv::Writer::from_writer(w))
    }
}
