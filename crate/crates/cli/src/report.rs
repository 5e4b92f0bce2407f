use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Config,
    Solver,
}

impl Failure {
    pub fn exit_code(self) -> u8 {
        match self {
            Failure::Config => 1,
            Failure::Solver => 2,
        }
    }

    fn status(self) -> &'static str {
        match self {
            Failure::Config => "config_error",
            Failure::Solver => "solver_error",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: Failure,
    pub code: String,
    pub message: String,
}

impl CliError {
    pub fn config(code: &str, message: impl Into<String>) -> Self {
        CliError { kind: Failure::Config, code: code.into(), message: message.into() }
    }

    pub fn solver(code: &str, message: impl Into<String>) -> Self {
        CliError { kind: Failure::Solver, code: code.into(), message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Library messages already start with their code.
        if self.message.starts_with(&self.code) {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.code, self.message)
        }
    }
}

macro_rules! solver_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::solver(e.code(), e.to_string())
            }
        }
    )*};
}

solver_error!(
    kinrel::eos::EosError,
    kinrel::endstate::EndStateError,
    kinrel::profile::ProfileError,
    kinrel::riemann::RiemannError
);

/// Parse a JSON config, naming the offending field on failure.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config("config_io", format!("cannot read {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let at = e.path().to_string();
        let inner = e.into_inner();
        CliError::config("config_schema", format!("{}: at `{at}`: {inner}", path.display()))
    })?;
    de.end().map_err(|e| CliError::config("config_schema", format!("{}: {e}", path.display())))?;
    Ok(value)
}

/// What a command produced: summary fields, files written, and an optional
/// failure that still leaves artifacts behind.
#[derive(Debug, Default)]
pub struct Report {
    pub fields: Map<String, Value>,
    pub artifacts: Vec<String>,
    pub failure: Option<CliError>,
}

impl Report {
    pub fn set<T: Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.fields.insert(key.to_string(), v);
    }
}

pub struct Output {
    pub dir: PathBuf,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::config("output_io", format!("cannot create {}: {e}", dir.display())))?;
        Ok(Output { dir: dir.to_path_buf() })
    }

    pub fn write_bytes(&self, report: &mut Report, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| CliError::config("output_io", format!("cannot write {}: {e}", path.display())))?;
        log::info!("wrote {}", path.display());
        report.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&self, report: &mut Report, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes =
            serde_json::to_vec_pretty(value).map_err(|e| CliError::solver("serialization", e.to_string()))?;
        bytes.push(b'\n');
        self.write_bytes(report, name, &bytes)
    }

    /// Fill a CSV through `write` and store it under `name`.
    pub fn write_csv(
        &self,
        report: &mut Report,
        name: &str,
        write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        write(&mut buf).map_err(|e| CliError::solver("serialization", e.to_string()))?;
        self.write_bytes(report, name, &buf)
    }
}

/// Assemble and write `summary.json`. Returns the path written, if any.
pub fn write_summary(
    dir: &Path,
    command: &str,
    config: &Path,
    report: &Report,
    error: Option<&CliError>,
    seconds: f64,
) -> Option<PathBuf> {
    let mut root = Map::new();
    root.insert("command".into(), command.into());
    root.insert("config".into(), config.display().to_string().into());
    let status = error.map_or("ok", |e| e.kind.status());
    root.insert("status".into(), status.into());
    if let Some(e) = error {
        let mut err = Map::new();
        err.insert("code".into(), e.code.clone().into());
        err.insert("message".into(), e.to_string().into());
        root.insert("error".into(), Value::Object(err));
    }
    root.insert("artifacts".into(), report.artifacts.clone().into());
    root.insert("wall_clock_s".into(), seconds.into());
    for (k, v) in &report.fields {
        root.insert(k.clone(), v.clone());
    }
    let path = dir.join("summary.json");
    if fs::create_dir_all(dir).is_err() {
        return None;
    }
    let mut bytes = serde_json::to_vec_pretty(&Value::Object(root)).ok()?;
    bytes.push(b'\n');
    fs::write(&path, bytes).ok()?;
    Some(path)
}
