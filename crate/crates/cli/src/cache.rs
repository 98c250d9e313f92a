//! On-disk cache: one file per key, a JSON header line then the compact payload.
//!
//! The header carries the format version, the key, and a SHA-256 of the payload
//! line. Any mismatch or parse failure is treated as a miss.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const FORMAT_VERSION: &str = concat!("hodge-caj/", env!("CARGO_PKG_VERSION"), "/cache-1");

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// `flag` wins over `HODGE_CACHE_DIR`; neither means no caching.
    pub fn locate(flag: Option<&Path>) -> Option<Cache> {
        let dir = match flag {
            Some(p) => p.to_path_buf(),
            None => PathBuf::from(std::env::var_os("HODGE_CACHE_DIR")?),
        };
        Some(Cache { dir })
    }

    /// Content address of a request description.
    pub fn key(request: &Value) -> String {
        let text = format!("{FORMAT_VERSION}\n{request}");
        sha256_hex(text.as_bytes())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Option<Value> {
        let path = self.path(key);
        let text = fs::read_to_string(&path).ok()?;
        match parse_entry(&text, key) {
            Ok(v) => Some(v),
            Err(why) => {
                eprintln!("warning: ignoring cache entry {}: {why}", path.display());
                None
            }
        }
    }

    /// Atomic: written to a temporary file in the same directory, then renamed.
    pub fn store(&self, key: &str, payload: &Value) {
        if let Err(e) = self.try_store(key, payload) {
            eprintln!("warning: could not write cache entry: {e}");
        }
    }

    fn try_store(&self, key: &str, payload: &Value) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let body = payload.to_string();
        let header = json!({"version": FORMAT_VERSION, "key": key, "sha256": sha256_hex(body.as_bytes())});
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        writeln!(tmp, "{header}")?;
        writeln!(tmp, "{body}")?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }
}

fn parse_entry(text: &str, key: &str) -> Result<Value, String> {
    let (header, body) = text.split_once('\n').ok_or("missing header line")?;
    let body = body.strip_suffix('\n').unwrap_or(body);
    let h: Value = serde_json::from_str(header).map_err(|e| format!("bad header: {e}"))?;
    if h["version"] != FORMAT_VERSION {
        return Err(format!("version {} does not match {FORMAT_VERSION}", h["version"]));
    }
    if h["key"] != key {
        return Err("key mismatch".into());
    }
    if h["sha256"] != sha256_hex(body.as_bytes()) {
        return Err("checksum mismatch".into());
    }
    serde_json::from_str(body).map_err(|e| format!("bad payload: {e}"))
}
