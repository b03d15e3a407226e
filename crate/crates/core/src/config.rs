//! Flat `key = value` files: one pair per line, `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

pub fn parse_key_values(text: &str, source: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(source, idx + 1, format!("expected key = value, found {line:?}")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::parse(source, idx + 1, "empty key"));
        }
        if out.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(Error::parse(source, idx + 1, format!("duplicate key {key:?}")));
        }
    }
    Ok(out)
}

pub fn read_key_values(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_key_values(&text, &path.display().to_string())
}
