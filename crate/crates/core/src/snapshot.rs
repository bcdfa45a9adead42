//! Versioned JSON snapshot files exchanged between pipeline stages.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Snapshot format version written by this build.
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    data: T,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

/// Serializes `data` under a `{format, version, data}` header.
pub fn to_string<T: Serialize>(format: &str, data: &T) -> Result<String> {
    let env = Envelope {
        format: format.to_string(),
        version: SNAPSHOT_VERSION,
        data,
    };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

pub fn from_str<T: DeserializeOwned>(format: &str, text: &str, origin: &str) -> Result<T> {
    let err = |message: String| Error::Snapshot {
        path: origin.to_string(),
        message,
    };
    let header: Header = serde_json::from_str(text).map_err(|e| err(format!("unreadable header: {e}")))?;
    if header.format != format {
        return Err(err(format!("expected format {format:?}, found {:?}", header.format)));
    }
    if header.version != SNAPSHOT_VERSION {
        return Err(err(format!(
            "version mismatch: file has {}, this build reads {SNAPSHOT_VERSION}",
            header.version
        )));
    }
    let env: Envelope<T> = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
    Ok(env.data)
}

pub fn write<T: Serialize>(path: &Path, format: &str, data: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, to_string(format, data)?)?;
    Ok(())
}

pub fn read<T: DeserializeOwned>(path: &Path, format: &str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Snapshot {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    from_str(format, &text, &path.display().to_string())
}
