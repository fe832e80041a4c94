//! Plain-text matrix files.
//!
//! ```text
//! # a rotation on three modes
//! modes: 3
//! mode: exact
//! 1/2, -1/2*sqrt(3), 0
//! 1/2*sqrt(3), 1/2, 0
//! 0, 0, 1
//! ```
//!
//! Header lines are optional. Without `mode:` the file is exact when every
//! entry parses in the exact grammar and float otherwise.

use std::fmt;
use std::str::FromStr;

use beamsplit_core::exact::{parse_surd, QuadSurd};
use beamsplit_core::matrix::ExactMatrix;
use beamsplit_core::{Error, RotationMatrix, SkewMatrix};
use nalgebra::DMatrix;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(format!("mode must be 'exact' or 'float', found '{other}'")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Entries {
    Exact(Vec<Vec<QuadSurd>>),
    Float(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixDocument {
    modes: usize,
    entries: Entries,
}

/// A parse failure located by 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn column_of(line: &str, byte: usize) -> usize {
    line[..byte.min(line.len())].chars().count() + 1
}

struct Cell<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn exact_cell(c: &Cell) -> Result<QuadSurd, Located> {
    parse_surd(c.text).map_err(|e| match e {
        Error::Parse { offset, message } => Located {
            line: c.line,
            column: c.column + c.text[..offset.min(c.text.len())].chars().count(),
            message,
        },
        other => Located { line: c.line, column: c.column, message: other.to_string() },
    })
}

fn float_cell(c: &Cell) -> Result<f64, Located> {
    if let Ok(v) = c.text.parse::<f64>() {
        if v.is_finite() {
            return Ok(v);
        }
        return Err(Located { line: c.line, column: c.column, message: format!("entry '{}' is not finite", c.text) });
    }
    exact_cell(c).map(|v| v.to_f64())
}

impl MatrixDocument {
    pub fn from_matrix(m: &DMatrix<f64>, exact: Option<&ExactMatrix>) -> Self {
        let n = m.nrows();
        match exact {
            Some(e) => Self {
                modes: n,
                entries: Entries::Exact((0..n).map(|i| (0..n).map(|j| e[(i, j)].clone()).collect()).collect()),
            },
            None => Self { modes: n, entries: Entries::Float((0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect()) },
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn mode(&self) -> Mode {
        match self.entries {
            Entries::Exact(_) => Mode::Exact,
            Entries::Float(_) => Mode::Float,
        }
    }

    /// Parses a document; `force` overrides the `mode:` header.
    pub fn parse(src: &str, force: Option<Mode>) -> Result<Self, Located> {
        let mut declared_modes = None;
        let mut declared_mode = None;
        let mut cells: Vec<Vec<Cell>> = Vec::new();
        let mut header_line = 0;
        for (k, raw) in src.lines().enumerate() {
            let line_no = k + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let lead = content.len() - content.trim_start().len();
            if let Some((key, value)) = content.split_once(':') {
                let at = |off: usize| column_of(raw, off);
                if !cells.is_empty() {
                    return Err(Located { line: line_no, column: at(lead), message: "header after matrix rows".into() });
                }
                let value_col = at(key.len() + 1 + (value.len() - value.trim_start().len()));
                match key.trim() {
                    "modes" => {
                        let m: usize = value.trim().parse().map_err(|_| Located {
                            line: line_no,
                            column: value_col,
                            message: format!("modes must be a positive integer, found '{}'", value.trim()),
                        })?;
                        if m == 0 {
                            return Err(Located { line: line_no, column: value_col, message: "modes must be positive".into() });
                        }
                        declared_modes = Some(m);
                    }
                    "mode" => {
                        let m = value.trim().parse::<Mode>().map_err(|message| Located {
                            line: line_no,
                            column: value_col,
                            message,
                        })?;
                        declared_mode = Some(m);
                    }
                    other => {
                        return Err(Located {
                            line: line_no,
                            column: at(lead),
                            message: format!("unknown header '{other}'"),
                        })
                    }
                }
                header_line = line_no;
                continue;
            }
            let mut row = Vec::new();
            let mut start = 0;
            for piece in content.split(',') {
                let trimmed_lead = piece.len() - piece.trim_start().len();
                let text = piece.trim();
                let column = column_of(raw, start + trimmed_lead);
                if text.is_empty() {
                    return Err(Located { line: line_no, column, message: "empty entry".into() });
                }
                row.push(Cell { text, line: line_no, column });
                start += piece.len() + 1;
            }
            cells.push(row);
        }
        let m = declared_modes.unwrap_or(cells.len());
        if cells.is_empty() {
            return Err(Located { line: header_line.max(1), column: 1, message: "no matrix rows".into() });
        }
        if cells.len() != m {
            let last = &cells[cells.len() - 1][0];
            return Err(Located {
                line: last.line,
                column: 1,
                message: format!("expected {m} rows, found {}", cells.len()),
            });
        }
        for row in &cells {
            if row.len() != m {
                return Err(Located {
                    line: row[0].line,
                    column: row[row.len().min(m).max(1) - 1].column,
                    message: format!("expected {m} entries, found {}", row.len()),
                });
            }
        }
        let mode = match force.or(declared_mode) {
            Some(mode) => mode,
            None if cells.iter().flatten().all(|c| parse_surd(c.text).is_ok()) => Mode::Exact,
            None => Mode::Float,
        };
        let entries = match mode {
            Mode::Exact => Entries::Exact(
                cells.iter().map(|r| r.iter().map(exact_cell).collect()).collect::<Result<_, _>>()?,
            ),
            Mode::Float => Entries::Float(
                cells.iter().map(|r| r.iter().map(float_cell).collect()).collect::<Result<_, _>>()?,
            ),
        };
        Ok(Self { modes: m, entries })
    }

    fn float_matrix(&self) -> DMatrix<f64> {
        let n = self.modes;
        match &self.entries {
            Entries::Exact(rows) => DMatrix::from_fn(n, n, |i, j| rows[i][j].to_f64()),
            Entries::Float(rows) => DMatrix::from_fn(n, n, |i, j| rows[i][j]),
        }
    }

    fn exact_matrix(&self) -> Option<ExactMatrix> {
        match &self.entries {
            Entries::Exact(rows) => Some(DMatrix::from_fn(self.modes, self.modes, |i, j| rows[i][j].clone())),
            Entries::Float(_) => None,
        }
    }

    pub fn to_rotation(&self, path: &str) -> CliResult<RotationMatrix> {
        let invalid = |message: String| CliError::Invalid { path: path.to_string(), message };
        let m = self.float_matrix();
        if (m.determinant() + 1.0).abs() < 1e-6 {
            return Err(invalid(
                "determinant is −1; a beamsplitter is modelled with determinant equal to one, \
                 so flip the sign of one row first"
                    .into(),
            ));
        }
        let r = match self.exact_matrix() {
            Some(e) => RotationMatrix::from_exact(e),
            None => RotationMatrix::new(m),
        };
        r.map_err(|e| invalid(e.to_string()))
    }

    pub fn to_skew(&self, path: &str) -> CliResult<SkewMatrix> {
        let s = match self.exact_matrix() {
            Some(e) => SkewMatrix::from_exact(e),
            None => SkewMatrix::new(self.float_matrix()),
        };
        s.map_err(|e| CliError::Invalid { path: path.to_string(), message: e.to_string() })
    }
}

impl fmt::Display for MatrixDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "modes: {}", self.modes)?;
        writeln!(f, "mode: {}", self.mode())?;
        let rows: Vec<Vec<String>> = match &self.entries {
            Entries::Exact(rows) => rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
            Entries::Float(rows) => rows.iter().map(|r| r.iter().map(|v| format!("{v:?}")).collect()).collect(),
        };
        for r in rows {
            writeln!(f, "{}", r.join(", "))?;
        }
        Ok(())
    }
}

/// Reads and parses a matrix file.
pub fn load(path: &str, force: Option<Mode>) -> CliResult<MatrixDocument> {
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    MatrixDocument::parse(&src, force).map_err(|l| CliError::Syntax {
        path: path.to_string(),
        line: l.line,
        column: l.column,
        message: l.message,
    })
}
