//! Tabular sweep output with a stable schema: axis column first, then the
//! series columns in lexicographic order, then metadata as trailing `#`
//! comment lines. Every file records seed and trial count, so any row can be
//! reproduced from the file alone.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub axis_name: String,
    pub axis_values: Vec<f64>,
    /// Series label -> one value per axis point (NaN marks a point a series
    /// does not cover). BTreeMap keeps the column order lexicographic.
    pub series: BTreeMap<String, Vec<f64>>,
    /// Config echo, seed, trials, version.
    pub metadata: BTreeMap<String, String>,
}

impl SweepResult {
    pub fn new(axis_name: impl Into<String>, axis_values: Vec<f64>) -> Self {
        Self {
            axis_name: axis_name.into(),
            axis_values,
            series: BTreeMap::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn push_series(&mut self, label: impl Into<String>, values: Vec<f64>) {
        let label = label.into();
        assert_eq!(
            values.len(),
            self.axis_values.len(),
            "series {label} length mismatch"
        );
        self.series.insert(label, values);
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.axis_name);
        for label in self.series.keys() {
            out.push(',');
            out.push_str(label);
        }
        out.push('\n');
        for (i, axis) in self.axis_values.iter().enumerate() {
            out.push_str(&format_value(*axis));
            for values in self.series.values() {
                out.push(',');
                out.push_str(&format_value(values[i]));
            }
            out.push('\n');
        }
        for (key, value) in &self.metadata {
            out.push_str(&format!("# {key}={value}\n"));
        }
        out
    }

    pub fn write(&self, path: &Path, json: bool) -> Result<()> {
        let text = if json {
            serde_json::to_string_pretty(self).expect("serializable") + "\n"
        } else {
            self.to_csv()
        };
        let mut file =
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        file.write_all(text.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

/// Shortest f64 representation that round-trips; `.` decimal separator by
/// construction.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_schema_is_stable() {
        let mut sweep = SweepResult::new("N", vec![1.0, 2.0]);
        sweep.push_series("sim", vec![0.5, 0.25]);
        sweep.push_series("analytic", vec![0.5078125, 0.25]);
        sweep.set_meta("seed", 42);
        sweep.set_meta("trials", 1000);
        let csv = sweep.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "N,analytic,sim");
        assert_eq!(lines[1], "1,0.5078125,0.5");
        assert_eq!(lines[2], "2,0.25,0.25");
        assert_eq!(lines[3], "# seed=42");
        assert_eq!(lines[4], "# trials=1000");
    }

    #[test]
    fn values_round_trip_through_text() {
        for v in [0.1, 1.0 / 3.0, 2.8e-61, 0.9999999999999999] {
            let s = format_value(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }
}
