//! Report envelopes, CSV tables and atomic file output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    command: &'a str,
    version: &'a str,
    seed: u64,
    params: &'a Value,
    result: &'a Value,
}

pub fn envelope(command: &str, seed: u64, params: &Value, result: &Value) -> String {
    let e =
        Envelope { schema_version: SCHEMA_VERSION, command, version: env!("CARGO_PKG_VERSION"), seed, params, result };
    serde_json::to_string_pretty(&e).expect("reports serialize") + "\n"
}

/// CSV with a leading `# schema_version=...` comment line and a fixed header.
pub fn csv_table<R: Serialize>(command: &str, rows: &[R]) -> Result<String, String> {
    let mut buf = format!("# fracpk {command} schema_version={SCHEMA_VERSION}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for r in rows {
            w.serialize(r).map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())?;
    }
    String::from_utf8(buf).map_err(|e| e.to_string())
}

/// Write to `path` through a temporary file in the same directory, or to
/// stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        return out.flush();
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        k: usize,
        v: f64,
    }

    #[test]
    fn csv_has_comment_and_header() {
        let t = csv_table("demo", &[Row { k: 1, v: 0.5 }, Row { k: 2, v: 0.25 }]).unwrap();
        assert_eq!(t, "# fracpk demo schema_version=1\nk,v\n1,0.5\n2,0.25\n");
    }

    #[test]
    fn emit_replaces_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        emit("first", Some(&p)).unwrap();
        emit("second", Some(&p)).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
