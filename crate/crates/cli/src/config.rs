//! `--config <file.json>`: a flat JSON object whose keys are long flag names
//! of the chosen subcommand. Its entries are spliced into argv right after the
//! subcommand, so flags given on the command line win.

use std::path::Path;

use serde_json::Value;

pub const SUBCOMMANDS: [&str; 7] =
    ["verify-kernels", "seminorm", "counterexample", "check", "eigen", "asymptotics", "constants"];

/// Remove `--config` from `argv` and splice the file's flags in.
pub fn merge(mut argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut path = None;
    let mut i = 1;
    while i < argv.len() {
        if argv[i] == "--config" {
            if i + 1 >= argv.len() {
                return Err("--config needs a file path".into());
            }
            path = Some(argv.remove(i + 1));
            argv.remove(i);
        } else if let Some(p) = argv[i].strip_prefix("--config=") {
            path = Some(p.to_string());
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let flags = read_flags(Path::new(&path))?;
    let at = argv
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.as_str()))
        .ok_or_else(|| "--config given without a subcommand".to_string())?;
    argv.splice(at + 1..at + 1, flags);
    Ok(argv)
}

fn read_flags(path: &Path) -> Result<Vec<String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("config file {}: {e}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("config file {}: {e}", path.display()))?;
    let Value::Object(map) = value else {
        return Err(format!("config file {}: expected a JSON object", path.display()));
    };
    let mut out = Vec::new();
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let parts =
                    items.iter().map(scalar).collect::<Result<Vec<_>, _>>().map_err(|e| format!("{key}: {e}"))?;
                out.push(format!("{flag}={}", parts.join(",")));
            }
            other => out.push(format!("{flag}={}", scalar(&other).map_err(|e| format!("{key}: {e}"))?)),
        }
    }
    Ok(out)
}

fn scalar(v: &Value) -> Result<String, String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err("expected a number or string".into()),
    }
}
