use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{self, ScenarioConfig};
use crate::error::CliError;

/// Provenance attached to every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config_sha256: String,
}

impl Metadata {
    pub fn new(command: &str, config: &ScenarioConfig) -> Self {
        Self {
            tool: "spinmodes",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            seed: config.seed,
            config_sha256: config::hash(config),
        }
    }

    fn csv_header(&self) -> String {
        format!(
            "# tool: {} {}\n# command: {}\n# seed: {}\n# config_sha256: {}\n",
            self.tool, self.version, self.command, self.seed, self.config_sha256
        )
    }
}

/// Output directory that creates itself on first write.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn new(root: PathBuf) -> Self {
        Self { root }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn write(&self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.root).map_err(|e| io(&self.root, e))?;
        let path = self.path(name);
        fs::write(&path, body).map_err(|e| io(&path, e))?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    /// CSV with the metadata header, extra `# key: value` lines, a column
    /// header and the rows.
    pub fn csv<I>(&self, name: &str, meta: &Metadata, notes: &[(&str, String)], columns: &[&str], rows: I) -> Result<PathBuf, CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut body = meta.csv_header();
        for (k, v) in notes {
            let _ = writeln!(body, "# {k}: {v}");
        }
        body.push_str(&columns.join(","));
        body.push('\n');
        for row in rows {
            body.push_str(&row.join(","));
            body.push('\n');
        }
        self.write(name, &body)
    }

    pub fn json<S: Serialize>(&self, name: &str, value: &S) -> Result<PathBuf, CliError> {
        let body = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
        self.write(name, &body)
    }

    /// The resolved configuration, which re-parses to the same scenario.
    pub fn config(&self, meta: &Metadata, config: &ScenarioConfig) -> Result<PathBuf, CliError> {
        let body = format!(
            "# tool: {} {}\n# seed: {}\n# config_sha256: {}\n{}",
            meta.tool,
            meta.version,
            meta.seed,
            meta.config_sha256,
            config::to_toml(config)
        );
        self.write("config.toml", &body)
    }
}

fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io { path: path.to_path_buf(), source: e }
}

/// Shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x}")
}
