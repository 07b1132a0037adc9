use crate::config::Format;
use crate::CliError;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

pub const SCHEMA: u32 = 1;

pub struct Output {
    dir: PathBuf,
    pub format: Format,
    quiet: bool,
}

fn io_err(path: &std::path::Path, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

impl Output {
    pub fn new(dir: PathBuf, format: Format, quiet: bool) -> Result<Self, CliError> {
        std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        Ok(Output { dir, format, quiet })
    }

    pub fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    pub fn warn(&self, line: impl AsRef<str>) {
        eprintln!("warning: {}", line.as_ref());
    }

    /// Pretty JSON with a trailing newline. Map keys are sorted, so equal
    /// inputs give byte-identical files.
    pub fn json<V: Serialize>(&self, name: &str, value: &V) -> Result<(), CliError> {
        if !self.format.json() {
            return Ok(());
        }
        let path = self.dir.join(name);
        let v = serde_json::to_value(value).map_err(|e| CliError::Numeric(e.to_string()))?;
        let mut text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Numeric(e.to_string()))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| io_err(&path, e))
    }

    pub fn csv<F>(&self, name: &str, write: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> halfspec::Result<()>,
    {
        if !self.format.csv() {
            return Ok(());
        }
        let path = self.dir.join(name);
        let mut w = BufWriter::new(File::create(&path).map_err(|e| io_err(&path, e))?);
        write(&mut w)?;
        w.flush().map_err(|e| io_err(&path, e))
    }
}
