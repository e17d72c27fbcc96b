use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use pro2eq_core::ENGINE_VERSION;

use crate::{CliError, Output};

/// On-disk result cache. Entries hold rendered output, stamped with the
/// engine version; entries from other versions are ignored.
#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    version: String,
    stdout: String,
    stderr: String,
    code: i32,
}

impl Cache {
    pub fn new(dir: &Path) -> Self {
        Cache {
            dir: dir.to_path_buf(),
        }
    }

    /// SHA-256 over the engine version and the given key parts.
    pub fn key(parts: &[&str]) -> String {
        let mut h = Sha256::new();
        h.update(ENGINE_VERSION.as_bytes());
        for p in parts {
            h.update([0u8]);
            h.update(p.as_bytes());
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2]).join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<Output> {
        let text = std::fs::read_to_string(self.path(key)).ok()?;
        let e: Entry = serde_json::from_str(&text).ok()?;
        (e.version == ENGINE_VERSION).then_some(Output {
            stdout: e.stdout,
            stderr: e.stderr,
            code: e.code,
        })
    }

    /// Writes to a temporary file in the target directory, then renames.
    pub fn put(&self, key: &str, out: &Output) -> Result<(), CliError> {
        let path = self.path(key);
        let dir = path.parent().expect("entry path has a parent");
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
        let entry = Entry {
            version: ENGINE_VERSION.to_string(),
            stdout: out.stdout.clone(),
            stderr: out.stderr.clone(),
            code: out.code,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(e.to_string()))?;
        tmp.write_all(serde_json::to_string(&entry).unwrap().as_bytes())
            .map_err(|e| CliError::io(e.to_string()))?;
        tmp.persist(&path).map_err(|e| CliError::io(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_stale_versions() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        let k = Cache::key(&["classify", "Z^3"]);
        assert!(c.get(&k).is_none());
        let out = Output {
            stdout: "{}\n".into(),
            stderr: "C_Z3\n".into(),
            code: 0,
        };
        c.put(&k, &out).unwrap();
        assert_eq!(c.get(&k), Some(out));
        let stale = r#"{"version":"0.0.0+0","stdout":"","stderr":"","code":0}"#;
        std::fs::write(c.path(&k), stale).unwrap();
        assert!(c.get(&k).is_none());
    }

    #[test]
    fn keys_separate_parts() {
        assert_ne!(Cache::key(&["ab", "c"]), Cache::key(&["a", "bc"]));
    }
}
