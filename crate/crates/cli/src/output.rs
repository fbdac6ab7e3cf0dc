use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// 17 significant digits; round-trips through `f64::from_str`.
pub fn num(v: f64) -> Value {
    Value::String(fmt_num(v))
}

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

pub enum Payload {
    Json(Value),
    Csv(String),
}

impl Payload {
    pub fn bytes(&self) -> Vec<u8> {
        match self {
            Payload::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
                s.push('\n');
                s.into_bytes()
            }
            Payload::Csv(s) => s.clone().into_bytes(),
        }
    }
}

fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

// temp file in the target directory, then rename over the destination
fn write_atomic(path: &Path, data: &[u8]) -> io::Result<()> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(data)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Writes `payload` to `out` (or stdout) and, for files, a manifest next to it.
pub fn emit<C: Serialize>(
    payload: Payload,
    out: Option<&Path>,
    command: &str,
    config: &C,
) -> io::Result<()> {
    let Some(out) = out else {
        return io::stdout().write_all(&payload.bytes());
    };
    let payload = match payload {
        Payload::Json(Value::Object(mut m)) => {
            let name = manifest_path(out)
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            m.insert("manifest".into(), Value::String(name));
            Payload::Json(Value::Object(m))
        }
        other => other,
    };
    let data = payload.bytes();
    write_atomic(out, &data)?;
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = json!({
        "command": command,
        "config": config,
        "library_version": env!("CARGO_PKG_VERSION"),
        "timestamp_unix": timestamp,
        "outputs": [{
            "file": out.file_name().map(|n| n.to_string_lossy().into_owned()),
            "sha256": sha256_hex(&data),
            "bytes": data.len(),
        }],
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("JSON values serialize");
    text.push('\n');
    write_atomic(&manifest_path(out), text.as_bytes())
}
