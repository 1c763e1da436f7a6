use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};
use crate::format::format_significant;

pub const MIN_PRECISION: usize = 6;
pub const MAX_PRECISION: usize = 17;
pub const DEFAULT_PRECISION: usize = 12;

/// Numeric CSV table. Rows are checked for finiteness when pushed.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        assert_eq!(row.len(), self.header.len(), "row width");
        if let Some((i, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(CliError::Config(format!(
                "non-finite {} = {v} in row {}",
                self.header[i],
                self.rows.len() + 1
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn header(&self) -> &[&'static str] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|row| row[i]).collect())
    }

    pub fn to_csv(&self, precision: usize) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_significant(v, precision)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn check_precision(precision: usize) -> Result<usize> {
    if (MIN_PRECISION..=MAX_PRECISION).contains(&precision) {
        Ok(precision)
    } else {
        Err(CliError::Config(format!(
            "precision must be in {MIN_PRECISION}..={MAX_PRECISION}, got {precision}"
        )))
    }
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(path) => {
            let io_error = |source| CliError::Io {
                path: path.to_path_buf(),
                source,
            };
            let mut file = BufWriter::new(File::create(path).map_err(io_error)?);
            file.write_all(text.as_bytes()).map_err(io_error)?;
            file.flush().map_err(io_error)
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}
