//! Output formats and number rendering.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("csv") => Ok(OutputFormat::Csv),
            Some("json") => Ok(OutputFormat::Json),
            _ => Err(CliError::OutputExtension(path.to_path_buf())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analytic,
    Simulate,
    Sweep,
    Scaling,
    ReproduceFig3,
}

/// What a CLI invocation was asked to do.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: Command,
    pub config_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunManifest {
    /// Format of a single-file output, if any.
    pub fn output_format(&self) -> Result<Option<OutputFormat>> {
        match (&self.output_path, self.command) {
            (_, Command::ReproduceFig3) | (None, _) => Ok(None),
            (Some(path), _) => OutputFormat::from_path(path).map(Some),
        }
    }
}

/// Renders `x` with 12 significant digits, '.' as decimal separator, and
/// trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.11e}");
        let (mantissa, exp) = s.split_once('e').expect("scientific format");
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}

/// Builds CSV text from a header and rows.
pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_rendering() {
        assert_eq!(fmt_num(22.0), "22");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(103.0 / 35.0), "2.94285714286");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(1.5e20), "1.5e20");
        assert_eq!(fmt_num(1.25e-7), "1.25e-7");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(999999999999.0), "999999999999");
    }

    #[test]
    fn extensions() {
        assert_eq!(OutputFormat::from_path(Path::new("a/b.csv")).unwrap(), OutputFormat::Csv);
        assert_eq!(OutputFormat::from_path(Path::new("b.JSON")).unwrap(), OutputFormat::Json);
        let err = OutputFormat::from_path(Path::new("b.txt")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(OutputFormat::from_path(Path::new("noext")).is_err());
    }

    #[test]
    fn manifest_format() {
        let m = RunManifest {
            command: Command::Sweep,
            config_path: None,
            output_path: Some("x.xml".into()),
            seed: None,
        };
        assert!(m.output_format().is_err());
        let m = RunManifest {
            command: Command::ReproduceFig3,
            output_path: Some("dir".into()),
            ..m
        };
        assert_eq!(m.output_format().unwrap(), None);
    }

    #[test]
    fn csv_quoting() {
        let bytes = csv_bytes(&["a", "b"], [vec!["x".to_string(), "10;12".to_string()]]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "a,b\nx,10;12\n");
    }
}
