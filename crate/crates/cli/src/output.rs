use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use ieh::{Error, Result};

/// Resolved run configuration, written as `# key=value` lines ahead of any
/// CSV so a file documents how it was produced.
pub struct Header {
    lines: Vec<String>,
}

impl Header {
    pub fn new(command: &str) -> Self {
        Self {
            lines: vec![format!("ieh {} {}", command, env!("CARGO_PKG_VERSION"))],
        }
    }

    pub fn set(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.lines.push(format!("{key}={value}"));
        self
    }

    pub fn write_to(&self, out: &mut dyn Write) -> io::Result<()> {
        for line in &self.lines {
            writeln!(out, "# {line}")?;
        }
        Ok(())
    }
}

/// A buffered file, or stdout when no path is given.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| at_path(p, Error::Io(e)))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Prefixes I/O errors with the offending path.
pub fn at_path(path: &Path, err: Error) -> Error {
    match err {
        Error::Io(e) => Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))),
        other => other,
    }
}
