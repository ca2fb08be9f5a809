use serde_json::Value;
use std::path::Path;
use weyl_lab::{Error, Result};

/// Path given by `--config <path>` or `--config=<path>`, if any.
pub fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Flags from a JSON object: `{"samples": 1000, "quick": true}` becomes
/// `--samples 1000 --quick`; arrays are joined with commas.
pub fn config_flags(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    let Value::Object(map) = v else {
        return Err(Error::Parse(format!("{}: config must be a JSON object", path.display())));
    };
    let mut out = Vec::new();
    for (k, v) in map {
        let flag = format!("--{}", k.replace('_', "-"));
        let scalar = |v: &Value| match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(Error::Parse(format!("config key {k:?}: unsupported value {other}"))),
        };
        match &v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let parts = items.iter().map(scalar).collect::<Result<Vec<_>>>()?;
                out.push(flag);
                out.push(parts.join(","));
            }
            other => {
                out.push(flag);
                out.push(scalar(other)?);
            }
        }
    }
    Ok(out)
}

/// Insert config flags right after the subcommand so explicit flags, which
/// come later, take precedence.
pub fn merge(args: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let flags = config_flags(Path::new(&path))?;
    let Some(pos) = args.iter().skip(1).position(|a| !a.starts_with('-')) else {
        return Ok(args);
    };
    let at = pos + 2;
    let mut out = args[..at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}
