//! Input loading, the JSON envelope, and CSV preambles.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use jsr_core::io::parse_matrix_set;
use jsr_core::{Budget, MatrixSet};

use crate::{CliError, OutArgs};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `JSR_BUDGET` overrides the product budget; plain integers or `1e7` style.
pub fn budget() -> Result<Budget, CliError> {
    match std::env::var("JSR_BUDGET") {
        Err(_) => Ok(Budget::default()),
        Ok(raw) => {
            let s = raw.trim();
            let v = s
                .parse::<u64>()
                .ok()
                .or_else(|| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|x| *x >= 1.0 && x.fract() == 0.0 && *x <= u64::MAX as f64)
                        .map(|x| x as u64)
                })
                .ok_or_else(|| CliError::Input(format!("JSR_BUDGET must be a positive integer, got {raw:?}")))?;
            if v == 0 {
                return Err(CliError::Input("JSR_BUDGET must be positive".into()));
            }
            Ok(Budget(v))
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn load_set(path: &Path) -> Result<MatrixSet, CliError> {
    parse_matrix_set(&read_text(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Metadata every output carries.
pub struct Meta<'a> {
    pub command: &'a str,
    pub seed: Option<u64>,
    pub budget: Budget,
    pub config: Value,
    pub provenance: Value,
}

impl<'a> Meta<'a> {
    pub fn new(command: &'a str, config: &impl Serialize, seed: Option<u64>, budget: Budget) -> Self {
        Meta {
            command,
            seed,
            budget,
            config: serde_json::to_value(config).expect("config serializes"),
            provenance: Value::Object(Default::default()),
        }
    }

    pub fn provenance(mut self, p: Value) -> Self {
        self.provenance = p;
        self
    }
}

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: Option<u64>,
    budget: u64,
    config: &'a Value,
    provenance: &'a Value,
    result: R,
}

fn deliver(out: &OutArgs, text: &str, summary: &str) -> Result<(), CliError> {
    match &out.out {
        Some(path) => {
            write_file(path, text)?;
            if !summary.is_empty() {
                println!("{summary}");
            }
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text(meta: &Meta<'_>, result: impl Serialize) -> String {
    let env = Envelope {
        tool: "jsr",
        version: VERSION,
        command: meta.command,
        seed: meta.seed,
        budget: meta.budget.0,
        config: &meta.config,
        provenance: &meta.provenance,
        result,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("result serializes");
    s.push('\n');
    s
}

/// Writes the JSON envelope; `summary` goes to stdout when writing a file.
pub fn emit_json(out: &OutArgs, meta: &Meta<'_>, result: impl Serialize, summary: &str) -> Result<(), CliError> {
    deliver(out, &json_text(meta, result), summary)
}

/// CSV body behind `# key: value` comment lines.
pub fn emit_csv(
    out: &OutArgs,
    meta: &Meta<'_>,
    extra: &[(&str, Value)],
    body: &str,
    summary: &str,
) -> Result<(), CliError> {
    let mut text = String::new();
    text.push_str(&format!("# tool: jsr {VERSION}\n"));
    text.push_str(&format!("# command: {}\n", meta.command));
    if let Some(seed) = meta.seed {
        text.push_str(&format!("# seed: {seed}\n"));
    }
    text.push_str(&format!("# budget: {}\n", meta.budget.0));
    text.push_str(&format!("# config: {}\n", meta.config));
    text.push_str(&format!("# provenance: {}\n", meta.provenance));
    for (k, v) in extra {
        text.push_str(&format!("# {k}: {v}\n"));
    }
    text.push_str(body);
    deliver(out, &text, summary)
}

/// Splits a CSV with `# key: value` preamble into (metadata, body).
pub fn split_preamble(text: &str) -> (Vec<(String, String)>, String) {
    let mut meta = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim_start().split_once(':') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    (meta, body)
}
