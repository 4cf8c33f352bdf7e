use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// File name of the manifest inside a run directory.
pub const MANIFEST_NAME: &str = "manifest.json";

pub fn hash_file(path: &Path) -> Result<String> {
    let mut f = fs::File::open(path)?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let k = f.read(&mut buf)?;
        if k == 0 {
            break;
        }
        h.update(&buf[..k]);
    }
    Ok(hex::encode(h.finalize()))
}

/// `target` expressed relative to the directory `base` (both made absolute first).
pub fn relative_path(target: &Path, base: &Path) -> Result<PathBuf> {
    let abs = |p: &Path| -> Result<PathBuf> {
        let p = if p.is_absolute() { p.to_path_buf() } else { std::env::current_dir()?.join(p) };
        Ok(p.components().fold(PathBuf::new(), |mut acc, c| {
            match c {
                Component::ParentDir => {
                    acc.pop();
                }
                Component::CurDir => {}
                c => acc.push(c),
            }
            acc
        }))
    };
    let (t, b) = (abs(target)?, abs(base)?);
    let tc: Vec<_> = t.components().collect();
    let bc: Vec<_> = b.components().collect();
    let common = tc.iter().zip(&bc).take_while(|(x, y)| x == y).count();
    let mut out = PathBuf::new();
    for _ in common..bc.len() {
        out.push("..");
    }
    for c in &tc[common..] {
        out.push(c);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the manifest's directory, `/`-separated.
    pub path: String,
    pub sha256: String,
}

/// Provenance record written next to every output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Parameters and configuration echo.
    pub config: BTreeMap<String, String>,
    pub inputs: Vec<Artifact>,
    pub outputs: Vec<Artifact>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn with_config(mut self, key: &str, value: impl ToString) -> Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    fn artifact(dir: &Path, path: &Path) -> Result<Artifact> {
        let rel = relative_path(path, dir)?;
        let parts: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
        Ok(Artifact {
            path: parts.join("/"),
            sha256: hash_file(path)?,
        })
    }

    /// Hash the given files; `manifest_path` fixes the base for relative paths.
    pub fn record(&mut self, manifest_path: &Path, inputs: &[PathBuf], outputs: &[PathBuf]) -> Result<()> {
        let dir = manifest_dir(manifest_path);
        for p in inputs {
            self.inputs.push(Self::artifact(&dir, p)?);
        }
        for p in outputs {
            self.outputs.push(Self::artifact(&dir, p)?);
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| Error::Data(e.to_string()))?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    /// Parse and check every recorded hash.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let m: RunManifest = serde_json::from_str(&text)
            .map_err(|e| Error::format(path.display().to_string(), e.line(), e.to_string()))?;
        m.verify(path)?;
        Ok(m)
    }

    pub fn verify(&self, manifest_path: &Path) -> Result<()> {
        let dir = manifest_dir(manifest_path);
        for a in self.inputs.iter().chain(&self.outputs) {
            let p = dir.join(&a.path);
            let actual = hash_file(&p)?;
            if actual != a.sha256 {
                return Err(Error::HashMismatch {
                    path: p,
                    expected: a.sha256.clone(),
                    actual,
                });
            }
        }
        Ok(())
    }

    /// Paths of the outputs, resolved against the manifest location.
    pub fn output_paths(&self, manifest_path: &Path) -> Vec<PathBuf> {
        let dir = manifest_dir(manifest_path);
        self.outputs.iter().map(|a| dir.join(&a.path)).collect()
    }

    /// Manifest accompanying a file (`<file>.manifest.json`) or a directory.
    pub fn companion_path(path: &Path) -> PathBuf {
        if path.is_dir() {
            path.join(MANIFEST_NAME)
        } else {
            let mut s = path.as_os_str().to_owned();
            s.push(".manifest.json");
            PathBuf::from(s)
        }
    }

    /// Verify the companion manifest of `path` if one exists.
    pub fn verify_companion(path: &Path) -> Result<Option<Self>> {
        let m = Self::companion_path(path);
        if m.exists() {
            Self::load(&m).map(Some)
        } else {
            Ok(None)
        }
    }
}

fn manifest_dir(manifest_path: &Path) -> PathBuf {
    match manifest_path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}
