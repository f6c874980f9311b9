//! CSV tables: header row required, comma separated.

use std::io::Write;
use std::path::Path;

use sensormap::FeatureMatrix;

use crate::error::{CliError, CliResult};

/// Numeric columns that identify rows rather than measure anything; they
/// are passed through instead of used as features.
pub const ID_COLUMNS: &[&str] = &["index", "frame_index", "engine_id", "cycle"];

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Line number in the source file of data row `i` (the header is line 1).
pub fn line_of(i: usize) -> usize {
    i + 2
}

impl Table {
    pub fn from_reader<R: std::io::Read>(r: R, name: &str) -> CliResult<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| CliError::data(format!("{name}: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        if headers.is_empty() || headers.iter().all(String::is_empty) {
            return Err(CliError::data(format!("{name}: missing header row")));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| CliError::data(format!("{name}: {e}")))?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        if rows.is_empty() {
            return Err(CliError::data(format!("{name}: no data rows")));
        }
        Ok(Self { headers, rows })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let f = std::fs::File::open(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_reader(f, &path.display().to_string())
    }

    pub fn column(&self, name: &str) -> CliResult<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::usage(format!("no column named '{name}'")))
    }

    pub fn is_numeric(&self, c: usize) -> bool {
        self.rows.iter().all(|r| r[c].parse::<f64>().is_ok_and(f64::is_finite))
    }

    pub fn numeric(&self, c: usize) -> CliResult<Vec<f64>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| parse_cell(&r[c], &self.headers[c], i))
            .collect()
    }

    pub fn strings(&self, c: usize) -> Vec<String> {
        self.rows.iter().map(|r| r[c].clone()).collect()
    }

    pub fn keep_rows(&self, keep: &[bool]) -> Table {
        Table {
            headers: self.headers.clone(),
            rows: self
                .rows
                .iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(r, _)| r.clone())
                .collect(),
        }
    }

    /// Split columns into features and pass-through columns.
    ///
    /// Pass-through columns are the named label columns, any [`ID_COLUMNS`]
    /// present, and every column holding a non-numeric value.
    pub fn split_features(&self, label_cols: &[String]) -> CliResult<(Vec<usize>, Vec<usize>)> {
        for l in label_cols {
            self.column(l)?;
        }
        let (mut feats, mut pass) = (Vec::new(), Vec::new());
        for (c, h) in self.headers.iter().enumerate() {
            if label_cols.contains(h) || ID_COLUMNS.contains(&h.as_str()) || !self.is_numeric(c) {
                pass.push(c);
            } else {
                feats.push(c);
            }
        }
        if feats.is_empty() {
            return Err(CliError::data("no numeric feature columns found"));
        }
        Ok((feats, pass))
    }

    pub fn matrix(&self, cols: &[usize]) -> CliResult<FeatureMatrix> {
        let mut data = Vec::with_capacity(self.rows.len() * cols.len());
        for (i, r) in self.rows.iter().enumerate() {
            for &c in cols {
                data.push(parse_cell(&r[c], &self.headers[c], i)?);
            }
        }
        let a = ndarray::Array2::from_shape_vec((self.rows.len(), cols.len()), data)
            .expect("shape matches");
        let names = cols.iter().map(|&c| self.headers[c].clone()).collect();
        Ok(FeatureMatrix::new(a)?.with_column_names(names)?)
    }

    /// Embedding coordinate columns: `explicit` if given, otherwise every
    /// `dimN` column in numeric order.
    pub fn dims(&self, explicit: Option<&[String]>) -> CliResult<Vec<usize>> {
        if let Some(names) = explicit {
            return names.iter().map(|n| self.column(n)).collect();
        }
        let mut found: Vec<(usize, usize)> = self
            .headers
            .iter()
            .enumerate()
            .filter_map(|(c, h)| h.strip_prefix("dim")?.parse::<usize>().ok().map(|k| (k, c)))
            .collect();
        found.sort_unstable();
        if found.is_empty() {
            return Err(CliError::data("no dimN coordinate columns found"));
        }
        Ok(found.into_iter().map(|(_, c)| c).collect())
    }
}

pub fn parse_cell(cell: &str, column: &str, row: usize) -> CliResult<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::data(format!(
            "line {}: column '{column}': '{cell}' is not a finite number",
            line_of(row)
        ))),
    }
}

/// A `column <op> value` row predicate, e.g. `cycle<=60` or `normal==yes`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowFilter {
    column: String,
    op: &'static str,
    value: String,
}

const OPS: &[&str] = &["<=", ">=", "==", "!=", "<", ">"];

impl std::str::FromStr for RowFilter {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        for &op in OPS {
            if let Some((c, v)) = s.split_once(op) {
                let (c, v) = (c.trim(), v.trim());
                if c.is_empty() || v.is_empty() {
                    break;
                }
                return Ok(Self { column: c.into(), op, value: v.into() });
            }
        }
        Err(CliError::usage(format!(
            "cannot parse row filter '{s}'; expected e.g. 'cycle<=60'"
        )))
    }
}

impl RowFilter {
    pub fn mask(&self, t: &Table) -> CliResult<Vec<bool>> {
        let c = t.column(&self.column)?;
        let num = self.value.parse::<f64>().ok();
        t.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let cell = &r[c];
                match (self.op, num) {
                    ("==", _) if num.is_none() => Ok(*cell == self.value),
                    ("!=", _) if num.is_none() => Ok(*cell != self.value),
                    (_, Some(v)) => {
                        let x = parse_cell(cell, &self.column, i)?;
                        Ok(match self.op {
                            "<=" => x <= v,
                            ">=" => x >= v,
                            "<" => x < v,
                            ">" => x > v,
                            "==" => x == v,
                            _ => x != v,
                        })
                    }
                    _ => Err(CliError::usage(format!(
                        "row filter: '{}' needs a numeric value",
                        self.op
                    ))),
                }
            })
            .collect()
    }
}

/// Open `-` as the given stream, anything else as a new file.
pub fn open_output<'a>(path: &Path, stdout: &'a mut dyn Write) -> CliResult<Box<dyn Write + 'a>> {
    if path == Path::new("-") {
        Ok(Box::new(stdout))
    } else {
        let f = std::fs::File::create(path)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
        Ok(Box::new(std::io::BufWriter::new(f)))
    }
}

pub fn io_err(e: std::io::Error) -> CliError {
    CliError::usage(format!("write failed: {e}"))
}
