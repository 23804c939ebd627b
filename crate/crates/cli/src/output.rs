//! Result records, output files and the per-run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::CliError;

/// One computed quantity in the shared record layout.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub op: String,
    pub params_hash: String,
    pub value: Value,
    pub stderr: Option<f64>,
    pub n: Option<u64>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    /// Additional named results (references, diagnostics).
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

pub struct Run {
    pub out: PathBuf,
    pub subcommand: String,
    pub config: Value,
    pub params_hash: String,
    pub seed: Option<u64>,
    pub threads: usize,
    /// Resolved run parameters recorded in the manifest.
    pub parameters: Map<String, Value>,
    start: Instant,
    outputs: Vec<(String, String)>,
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}

impl Run {
    pub fn new<T: Serialize>(out: &Path, subcommand: &str, config: &T, seed: Option<u64>, threads: usize) -> Result<Self, CliError> {
        let config = serde_json::to_value(config)?;
        let params_hash = gricci::io::sha256_hex(serde_json::to_string(&json!({
            "subcommand": subcommand,
            "config": config,
        }))?);
        std::fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
        Ok(Self {
            out: out.to_path_buf(),
            subcommand: subcommand.into(),
            config,
            params_hash,
            seed,
            threads,
            parameters: Map::new(),
            start: Instant::now(),
            outputs: Vec::new(),
        })
    }

    pub fn record(&self, op: &str, value: Value) -> Record {
        Record {
            op: op.into(),
            params_hash: self.params_hash.clone(),
            value,
            stderr: None,
            n: None,
            seed: self.seed,
            epsilon: None,
            extra: Map::new(),
        }
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out.join(name);
        std::fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
        self.outputs.push((name.into(), gricci::io::sha256_hex(contents)));
        Ok(())
    }

    /// Writes `<subcommand>.json` holding the records.
    pub fn write_records(&mut self, records: &[Record]) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(records)? + "\n";
        let name = format!("{}.json", self.subcommand);
        self.write(&name, &text)
    }

    /// Writes `<subcommand>.manifest.json`; called on success and on failure.
    pub fn finish(&self, status: &str) -> Result<(), CliError> {
        let outputs: Map<String, Value> =
            self.outputs.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let manifest = json!({
            "tool": "gricci",
            "version": env!("CARGO_PKG_VERSION"),
            "core_version": gricci::VERSION,
            "subcommand": self.subcommand,
            "config": self.config,
            "config_hash": self.params_hash,
            "seed": self.seed,
            "threads": self.threads,
            "parameters": self.parameters,
            "wall_time": self.start.elapsed().as_secs_f64(),
            "status": status,
            "outputs": outputs,
        });
        let path = self.out.join(format!("{}.manifest.json", self.subcommand));
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(|e| io_err(&path, e))
    }
}

/// Prints records as an aligned `key  value` table; a closed pipe is not an error.
pub fn print_table(records: &[Record]) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    for r in records {
        let mut text = format!("{}\n", r.op);
        let mut rows: Vec<(String, String)> = vec![("value".into(), fmt_value(&r.value))];
        if let Some(s) = r.stderr {
            rows.push(("stderr".into(), format!("{s:.6e}")));
        }
        if let Some(n) = r.n {
            rows.push(("n".into(), n.to_string()));
        }
        if let Some(s) = r.seed {
            rows.push(("seed".into(), s.to_string()));
        }
        if let Some(e) = r.epsilon {
            rows.push(("epsilon".into(), e.to_string()));
        }
        for (k, v) in &r.extra {
            rows.push((k.clone(), fmt_value(v)));
        }
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        for (k, v) in rows {
            let mut lines = v.lines();
            text += &format!("  {k:width$}  {}\n", lines.next().unwrap_or(""));
            for l in lines {
                text += &format!("  {:width$}  {l}\n", "");
            }
        }
        if out.write_all(text.as_bytes()).is_err() {
            return;
        }
    }
}

fn fmt_value(v: &Value) -> String {
    match v {
        Value::Number(x) if x.is_f64() => x.as_f64().map_or(x.to_string(), |f| format!("{f:.10e}")),
        Value::Array(rows) if rows.iter().all(Value::is_array) && !rows.is_empty() => rows
            .iter()
            .map(|r| {
                r.as_array()
                    .into_iter()
                    .flatten()
                    .map(|x| x.as_f64().map_or(x.to_string(), |f| format!("{f:>13.6e}")))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n"),
        other => other.to_string(),
    }
}
