//! Run configuration: TOML file, then `--u/--v`, then `--set key=value`.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

use crate::CliError;

const TOP_LEVEL: [&str; 3] = ["seed", "workers", "out_dir"];
const SECTIONS: [&str; 6] = [
    "verify-algebra",
    "kernel",
    "constant-a",
    "simulate",
    "sample-stationary",
    "experiment",
];

/// Settings shared by all subcommands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Common {
    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
}

/// A parsed config file with its section for the running subcommand.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    root: Table,
}

impl RawConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let root: Table = text.parse().map_err(|e| CliError::config("config", format!("{e}")))?;
        for key in root.keys() {
            if !TOP_LEVEL.contains(&key.as_str()) && !SECTIONS.contains(&key.as_str()) {
                return Err(CliError::config(key, "unknown key"));
            }
        }
        Ok(RawConfig { root })
    }

    pub fn common(&self, seed: Option<u64>, workers: Option<usize>, out_dir: Option<PathBuf>) -> Result<Common, CliError> {
        let int = |key: &str| -> Result<Option<i64>, CliError> {
            match self.root.get(key) {
                None => Ok(None),
                Some(Value::Integer(i)) => Ok(Some(*i)),
                Some(other) => Err(CliError::config(key, format!("expected an integer, got {other}"))),
            }
        };
        let seed = match seed {
            Some(s) => s,
            None => match int("seed")? {
                Some(s) if s >= 0 => s as u64,
                Some(s) => return Err(CliError::config("seed", format!("must be non-negative, got {s}"))),
                None => 0,
            },
        };
        let workers = match workers {
            Some(w) => w,
            None => match int("workers")? {
                Some(w) => usize::try_from(w).map_err(|_| CliError::config("workers", "must be non-negative"))?,
                None => 1,
            },
        };
        if workers == 0 {
            return Err(CliError::config("workers", "need at least one worker"));
        }
        let out_dir = match out_dir {
            Some(d) => d,
            None => match self.root.get("out_dir") {
                None => PathBuf::from("openkpz-out"),
                Some(Value::String(s)) => PathBuf::from(s),
                Some(other) => return Err(CliError::config("out_dir", format!("expected a string, got {other}"))),
            },
        };
        Ok(Common { seed, workers, out_dir })
    }

    /// The table at `path` (e.g. `["experiment", "ergodic"]`), empty if absent.
    pub fn section(&self, path: &[&str]) -> Result<Table, CliError> {
        let mut table = &self.root;
        for (i, key) in path.iter().enumerate() {
            match table.get(*key) {
                None => return Ok(Table::new()),
                Some(Value::Table(t)) => table = t,
                Some(_) => return Err(CliError::config(&path[..=i].join("."), "expected a table")),
            }
        }
        Ok(table.clone())
    }
}

/// Apply flag overrides and deserialize; unknown keys name the parameter.
pub fn resolve<T: DeserializeOwned>(
    mut table: Table,
    u: Option<f64>,
    v: Option<f64>,
    sets: &[String],
) -> Result<T, CliError> {
    if let Some(u) = u {
        table.insert("u".into(), Value::Float(u));
    }
    if let Some(v) = v {
        table.insert("v".into(), Value::Float(v));
    }
    for s in sets {
        let (key, raw) = s
            .split_once('=')
            .ok_or_else(|| CliError::config("set", format!("expected KEY=VALUE, got {s:?}")))?;
        let value = parse_value(raw.trim());
        insert_dotted(&mut table, key.trim(), value)?;
    }
    T::deserialize(Value::Table(table)).map_err(|e| {
        let msg = e.to_string();
        let param = msg
            .split('`')
            .nth(1)
            .map(str::to_string)
            .unwrap_or_else(|| "config".to_string());
        CliError::Config { parameter: param, message: msg.trim().to_string() }
    })
}

fn parse_value(raw: &str) -> Value {
    format!("x = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("x"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn insert_dotted(table: &mut Table, key: &str, value: Value) -> Result<(), CliError> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|k| !k.is_empty()).ok_or_else(|| CliError::config("set", "empty key"))?;
    let mut t = table;
    for p in parts {
        let entry = t.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        t = match entry {
            Value::Table(inner) => inner,
            _ => return Err(CliError::config(key, "is not a table")),
        };
    }
    t.insert(last.to_string(), value);
    Ok(())
}
