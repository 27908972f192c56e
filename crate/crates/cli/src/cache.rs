//! On-disk cache of classification summaries.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use crate::report::ClassifySummary;

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    /// Every input that changes the report goes into the key, together with
    /// the crate version.
    pub fn key(n: u32, m: u32, settings: &str) -> String {
        let mut h = Sha256::new();
        h.update(format!("classify\0{n}\0{m}\0{settings}\0{}", env!("CARGO_PKG_VERSION")));
        format!("{:x}", h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A missing or unreadable entry is a miss.
    pub fn load(&self, key: &str) -> Option<ClassifySummary> {
        let bytes = fs::read(self.path(key)).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    pub fn store(&self, key: &str, summary: &ClassifySummary) -> Result<()> {
        let tmp = self.dir.join(format!("{key}.tmp"));
        fs::write(&tmp, serde_json::to_vec(summary)?)?;
        fs::rename(&tmp, self.path(key))?;
        Ok(())
    }
}
