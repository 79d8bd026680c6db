use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};

/// One named output column of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// A 1-D parameter grid with named per-point outputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSeries {
    parameter: String,
    grid: Vec<f64>,
    columns: Vec<Column>,
    metadata: BTreeMap<String, String>,
}

impl SweepSeries {
    pub fn new(parameter: impl Into<String>, grid: Vec<f64>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidParameter("sweep grid is empty".into()));
        }
        Ok(Self {
            parameter: parameter.into(),
            grid,
            columns: Vec::new(),
            metadata: BTreeMap::new(),
        })
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                actual: values.len(),
            });
        }
        self.columns.push(Column {
            name: name.into(),
            values,
        });
        Ok(())
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    pub fn parameter(&self) -> &str {
        &self.parameter
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Header names: parameter first, then columns.
    pub fn header(&self) -> Vec<&str> {
        std::iter::once(self.parameter.as_str())
            .chain(self.columns.iter().map(|c| c.name.as_str()))
            .collect()
    }

    /// Row `i` as `[parameter, column values...]`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        std::iter::once(self.grid[i])
            .chain(self.columns.iter().map(|c| c.values[i]))
            .collect()
    }

    /// CSV with a header row. The parameter uses the shortest round-trip
    /// representation; outputs use six decimals.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.header().join(","))?;
        for (i, x) in self.grid.iter().enumerate() {
            write!(out, "{x}")?;
            for c in &self.columns {
                write!(out, ",{}", format_fixed(c.values[i]))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Six-decimal fixed point without a `-0.000000` artefact.
pub fn format_fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// `points` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, points: usize) -> Result<Vec<f64>> {
    if !(start.is_finite() && end.is_finite() && start < end) {
        return Err(Error::InvalidParameter(format!(
            "grid needs start < end, got [{start}, {end}]"
        )));
    }
    if points < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least 2 points, got {points}"
        )));
    }
    let step = (end - start) / (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            if k == points - 1 {
                end
            } else {
                start + step * k as f64
            }
        })
        .collect())
}
