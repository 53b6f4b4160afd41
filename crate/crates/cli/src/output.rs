//! Output sinks and the CSV/JSON dialects.
//!
//! CSV: comma separated, `#` header comments, LF line endings, numbers in
//! `{:.16e}` (17 significant digits, round-trip safe). JSON: pretty printed
//! with sorted keys and a trailing newline.

use std::fs::OpenOptions;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use crate::config::Config;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Destination chosen before any computation so that a refused overwrite
/// fails fast. The file is only created by [`Target::open`].
#[derive(Debug, Clone)]
pub enum Target {
    Stdout,
    File { path: PathBuf, force: bool },
}

impl Target {
    pub fn resolve(path: &str, force: bool) -> Result<Self, CliError> {
        if path == "-" {
            return Ok(Target::Stdout);
        }
        let path = PathBuf::from(path);
        if path.exists() && !force {
            return Err(CliError::Usage(format!(
                "{} already exists; pass --force to overwrite",
                path.display()
            )));
        }
        Ok(Target::File { path, force })
    }

    pub fn open(&self) -> Result<Box<dyn Write>, CliError> {
        match self {
            Target::Stdout => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
            Target::File { path, force } => {
                let mut opts = OpenOptions::new();
                opts.write(true);
                if *force {
                    opts.create(true).truncate(true);
                } else {
                    opts.create_new(true);
                }
                let file = opts.open(path).map_err(|e| match e.kind() {
                    io::ErrorKind::AlreadyExists => CliError::Usage(format!(
                        "{} already exists; pass --force to overwrite",
                        path.display()
                    )),
                    _ => CliError::Io(e),
                })?;
                Ok(Box::new(BufWriter::new(file)))
            }
        }
    }
}

/// Comment block opening every CSV file: version, command, every config
/// value, then command-specific resolved quantities.
pub fn csv_header(out: &mut dyn Write, command: &str, cfg: &Config, resolved: &[(String, String)]) -> io::Result<()> {
    writeln!(out, "# raman-cqed {VERSION}")?;
    writeln!(out, "# command: {command}")?;
    for (k, v) in cfg.entries() {
        writeln!(out, "# param {k}={v}")?;
    }
    for (k, v) in resolved {
        writeln!(out, "# resolved {k}={v}")?;
    }
    Ok(())
}

/// Config values as a JSON object.
pub fn params_json(cfg: &Config) -> serde_json::Value {
    serde_json::Value::Object(
        cfg.entries()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect(),
    )
}

pub fn write_json(target: &Target, value: &serde_json::Value) -> Result<(), CliError> {
    let mut out = target.open()?;
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.into()))?;
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}
