use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use ficogarch::manifest::Manifest;

/// Where CSV tables and the manifest go: files under `--out`, or stdout
/// (tables) and stderr (manifest).
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<&Path>) -> Result<Self> {
        if let Some(d) = dir {
            fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Self { dir: dir.map(Path::to_path_buf) })
    }

    pub fn table(&self, name: &str, body: &str, manifest: &mut Manifest) -> Result<()> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
                manifest.outputs.push(name.to_string());
            }
            None => io::stdout().lock().write_all(body.as_bytes())?,
        }
        Ok(())
    }

    pub fn finish(&self, manifest: &Manifest) -> Result<()> {
        match &self.dir {
            Some(d) => manifest.write(&d.join("manifest.json"))?,
            None => eprintln!("{}", manifest.to_json()?),
        }
        Ok(())
    }
}

/// Reads one numeric column of a CSV file with a header row.
pub fn read_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let idx = headers
        .iter()
        .position(|h| h.trim() == column)
        .ok_or_else(|| anyhow!("column '{column}' not found in {} (have: {})", path.display(), headers.iter().collect::<Vec<_>>().join(", ")))?;
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = record.get(idx).ok_or_else(|| anyhow!("row {} has no column {column}", line + 2))?;
        let value: f64 = field.trim().parse().with_context(|| format!("row {}: '{field}' is not a number", line + 2))?;
        out.push(value);
    }
    if out.is_empty() {
        bail!("{} has no data rows", path.display());
    }
    Ok(out)
}
