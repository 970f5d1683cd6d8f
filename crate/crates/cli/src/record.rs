//! Run records and their CSV/JSON serializations.
//!
//! Floats are written with 17 significant digits so identical runs give
//! identical bytes.

use std::io::Write;

use serde_json::json;

use crate::config::Config;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    F(f64),
    I(i64),
    B(bool),
    S(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::F(x) => Some(*x),
            Value::I(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn csv_cell(&self) -> String {
        match self {
            Value::F(x) if x.is_nan() => "nan".into(),
            Value::F(x) => format!("{x:.16e}"),
            Value::I(i) => i.to_string(),
            Value::B(b) => b.to_string(),
            Value::S(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::F(x) if !x.is_finite() => serde_json::Value::Null,
            Value::F(x) => json!(x),
            Value::I(i) => json!(i),
            Value::B(b) => json!(b),
            Value::S(s) => json!(s),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::F(x)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::B(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::S(s.to_string())
    }
}

impl From<usize> for Value {
    fn from(i: usize) -> Self {
        Value::I(i as i64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub experiment: &'static str,
    pub config: Config,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// Whole-run diagnostics, in emission order.
    pub summary: Vec<(&'static str, Value)>,
}

impl RunRecord {
    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    pub fn summary_value(&self, name: &str) -> Option<&Value> {
        self.summary
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| v)
    }

    fn config_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.config).expect("config serializes")
    }

    /// `#` preamble with version, config and summary, then the header row and data.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        writeln!(out, "# geophase {VERSION}")?;
        writeln!(out, "# experiment: {}", self.experiment)?;
        writeln!(out, "# config: {}", self.config_json())?;
        for (k, v) in &self.summary {
            writeln!(out, "# {k}: {}", v.csv_cell())?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Value::csv_cell))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        let summary: serde_json::Map<String, serde_json::Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.to_string(), v.json()))
            .collect();
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| serde_json::Value::Array(r.iter().map(Value::json).collect()))
            .collect();
        let doc = json!({
            "version": VERSION,
            "experiment": self.experiment,
            "config": self.config_json(),
            "summary": summary,
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut out, &doc).map_err(std::io::Error::other)?;
        writeln!(out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_cells_carry_seventeen_digits() {
        assert_eq!(Value::F(0.1).csv_cell(), "1.0000000000000001e-1");
        assert_eq!(Value::F(-2.0).csv_cell(), "-2.0000000000000000e0");
        assert_eq!(Value::F(f64::NAN).csv_cell(), "nan");
        let x = 0.588_210_153_884_394_3f64;
        assert_eq!(Value::F(x).csv_cell().parse::<f64>().unwrap(), x);
    }
}
