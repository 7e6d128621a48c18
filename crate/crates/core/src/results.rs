//! Tabular experiment output and rate fitting.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Errors at or below this level are treated as round-off and skipped by
/// [`fit_slope`].
pub const SLOPE_FLOOR: f64 = 1e-13;

/// One cell of a [`ResultTable`].
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Float(x) => format!("{x:.16e}"),
            Value::Int(i) => i.to_string(),
            Value::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            Value::Text(_) => None,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

/// Rectangular table of experiment rows with free-form metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
    pub metadata: BTreeMap<String, String>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        ResultTable {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn push(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Numeric column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    /// CSV body: header row, comma-separated, LF line endings, floats with
    /// 17 significant digits. Metadata is not part of the body.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::render).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Least-squares slope of `log(error)` against `log(δ)`.
///
/// Pairs with `error ≤ 1e-13` are excluded as floor-dominated; at least three
/// pairs are required on input and two must survive the filter.
pub fn fit_slope(deltas: &[f64], errors: &[f64]) -> Result<f64> {
    if deltas.len() != errors.len() {
        return Err(Error::InvalidArgument("δ and error lists differ in length".into()));
    }
    if deltas.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 points, got {}",
            deltas.len()
        )));
    }
    let pts: Vec<(f64, f64)> = deltas
        .iter()
        .zip(errors)
        .filter(|(d, e)| **d > 0.0 && **e > SLOPE_FLOOR && e.is_finite())
        .map(|(d, e)| (d.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidArgument(
            "fewer than 2 points above the error floor".into(),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("δ values must not all coincide".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slopes_of_power_laws() {
        let d = [0.2, 0.1, 0.05, 0.025];
        let lin: Vec<f64> = d.iter().map(|x| 3.0 * x).collect();
        let quad: Vec<f64> = d.iter().map(|x| 0.5 * x * x).collect();
        assert!((fit_slope(&d, &lin).unwrap() - 1.0).abs() < 1e-10);
        assert!((fit_slope(&d, &quad).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn floor_points_are_ignored() {
        let d = [0.2, 0.1, 0.05, 0.025];
        let mut e: Vec<f64> = d.iter().map(|x| 3.0 * x).collect();
        let full = fit_slope(&d[..3], &e[..3]).unwrap();
        e[3] = 1e-15;
        assert!((fit_slope(&d, &e).unwrap() - full).abs() < 1e-12);
        assert!(fit_slope(&d[..2], &e[..2]).is_err());
        assert!(fit_slope(&d, &[1e-15; 4]).is_err());
    }

    #[test]
    fn csv_rendering() {
        let mut t = ResultTable::new(["delta", "n", "label"]);
        t.push(vec![0.1.into(), 3usize.into(), "a,b".into()]).unwrap();
        assert!(t.push(vec![1.0.into()]).is_err());
        assert_eq!(t.to_csv(), "delta,n,label\n1.0000000000000001e-1,3,\"a,b\"\n");
        assert_eq!(t.column("delta").unwrap(), vec![0.1]);
    }
}
