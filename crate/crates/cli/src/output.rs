use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// SHA-256 of the JSON form of a command's effective configuration.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    hex::encode(Sha256::digest(serde_json::to_vec(config).expect("config serializes")))
}

/// A CSV document: `#` comment lines, a header row and records.
pub struct Csv {
    comments: Vec<String>,
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    pub fn new(command: &str, hash: &str, header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Csv { comments: vec![format!("qpoker {command}"), format!("config_hash: {hash}")], writer }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn row<I, S>(&mut self, fields: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
        self
    }

    pub fn into_bytes(self) -> Vec<u8> {
        let mut out: Vec<u8> = self.comments.iter().flat_map(|c| format!("# {c}\n").into_bytes()).collect();
        out.extend(self.writer.into_inner().expect("in-memory flush"));
        out
    }
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::runtime(e.to_string())),
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::runtime(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

/// Shortest text that parses back to the same `f64`.
pub fn fmt_f(x: f64) -> String {
    format!("{x}")
}
