//! Run configuration: a JSON file whose keys mirror the command-line flags,
//! overridden by any flag given explicitly.

use std::collections::BTreeSet;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Merges `cli` over the config file at `path` (if any) for `subcommand`.
///
/// The accepted keys are exactly the fields of `T`, plus an optional
/// `"subcommand"` entry that must name the command being run.
pub fn resolve<T>(cli: &T, path: Option<&Path>, subcommand: &str) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned + Default,
{
    let known: BTreeSet<String> = match serde_json::to_value(T::default())? {
        Value::Object(m) => m.keys().cloned().collect(),
        _ => BTreeSet::new(),
    };
    let mut merged = match path {
        None => Map::new(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            match serde_json::from_str::<Value>(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            {
                Value::Object(m) => m,
                _ => return Err(CliError::Config("config must be a JSON object".into())),
            }
        }
    };
    if let Some(cmd) = merged.remove("subcommand") {
        if cmd.as_str() != Some(subcommand) {
            return Err(CliError::Config(format!(
                "config is for subcommand {cmd}, not \"{subcommand}\""
            )));
        }
    }
    let unknown: Vec<&String> = merged.keys().filter(|k| !known.contains(*k)).collect();
    if !unknown.is_empty() {
        let list: Vec<&str> = unknown.iter().map(|s| s.as_str()).collect();
        return Err(CliError::Config(format!("unknown config keys: {}", list.join(", "))));
    }
    if let Value::Object(flags) = serde_json::to_value(cli)? {
        for (k, v) in flags {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(e.to_string()))
}

/// Parses counts such as `1e7` or `250000`.
pub fn parse_count(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    count(x).map(|n| n as f64).map_err(|e| e.to_string())
}

pub fn count(x: f64) -> Result<u64, CliError> {
    if x.is_finite() && x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(CliError::Config(format!("{x} is not a positive integer count")))
    }
}

/// Parses `a:b` into a pair.
pub fn parse_span(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected START:END, got `{s}`"))?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    Ok((p(a)?, p(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Default, Serialize, Deserialize, PartialEq, Debug)]
    struct Args {
        a: Option<f64>,
        b: Option<String>,
    }

    fn write(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        std::io::Write::write_all(&mut f, text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn flags_override_file() {
        let f = write(r#"{"subcommand": "x", "a": 1.0, "b": "file"}"#);
        let cli = Args { a: None, b: Some("flag".into()) };
        let r = resolve(&cli, Some(f.path()), "x").unwrap();
        assert_eq!(r, Args { a: Some(1.0), b: Some("flag".into()) });
    }

    #[test]
    fn rejects_unknown_keys_and_wrong_subcommand() {
        let f = write(r#"{"a": 1.0, "c": 2}"#);
        assert!(matches!(resolve(&Args::default(), Some(f.path()), "x"), Err(CliError::Config(_))));
        let g = write(r#"{"subcommand": "y"}"#);
        assert!(resolve(&Args::default(), Some(g.path()), "x").is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e7").unwrap(), 1e7);
        assert!(parse_count("0").is_err());
        assert!(parse_count("2.5").is_err());
        assert_eq!(parse_span("0:1.5").unwrap(), (0.0, 1.5));
    }
}
