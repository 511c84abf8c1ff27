//! Run records: time series of success probability with walk-step and
//! oracle-query accounting, renderable as CSV or JSON.
//!
//! CSV layout is `# key=value` metadata lines followed by a fixed column
//! header and one row per sample. Numbers are formatted deterministically
//! (integers bare, everything else at 12 significant digits) so identical
//! configurations produce byte-identical files.

use serde::Serialize;

use crate::error::{Error, Result};

/// Walk-step vs. oracle-query bookkeeping for a discrete run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QueryLedger {
    pub oracle_queries: u64,
    pub walk_steps: u64,
    pub steps_per_query: u64,
}

impl QueryLedger {
    /// Ledger for `oracle_queries` queries at `steps_per_query` walk steps
    /// each; the product invariant holds by construction.
    pub fn new(oracle_queries: u64, steps_per_query: u64) -> Self {
        Self {
            oracle_queries,
            walk_steps: oracle_queries * steps_per_query,
            steps_per_query,
        }
    }

    pub fn consistent(&self) -> bool {
        self.walk_steps == self.oracle_queries * self.steps_per_query
    }
}

/// One sampled point along a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RunRow {
    /// Step count (discrete) or time (continuous).
    pub index: f64,
    pub success_probability: f64,
    pub walk_steps: u64,
    /// Real-valued to cover continuous oracle time.
    pub oracle_queries: f64,
}

/// A full run: ordered metadata describing the configuration, then samples.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<RunRow>,
}

impl RunRecord {
    pub fn new(module: &str) -> Self {
        let mut rec = Self { metadata: Vec::new(), rows: Vec::new() };
        rec.push_meta("module", module);
        rec.push_meta("version", env!("CARGO_PKG_VERSION"));
        rec
    }

    pub fn push_meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn push_row(&mut self, row: RunRow) {
        self.rows.push(row);
    }

    /// Validates the RunRecord invariants: probabilities within [0, 1+1e−9]
    /// and strictly increasing index.
    pub fn validate(&self) -> Result<()> {
        let mut last = f64::NEG_INFINITY;
        for row in &self.rows {
            if !(0.0..=1.0 + 1e-9).contains(&row.success_probability) {
                return Err(Error::InvalidParameter(format!(
                    "success probability {} out of range at index {}",
                    row.success_probability, row.index
                )));
            }
            if row.index <= last {
                return Err(Error::InvalidParameter(format!(
                    "non-increasing index {} after {}",
                    row.index, last
                )));
            }
            last = row.index;
        }
        Ok(())
    }

    /// Row with the highest success probability; earliest wins ties.
    pub fn peak(&self) -> Option<&RunRow> {
        let mut best: Option<&RunRow> = None;
        for row in &self.rows {
            if best.is_none_or(|b| row.success_probability > b.success_probability) {
                best = Some(row);
            }
        }
        best
    }

    /// First row with success probability ≥ `threshold`.
    pub fn first_crossing(&self, threshold: f64) -> Option<&RunRow> {
        self.rows.iter().find(|r| r.success_probability >= threshold)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str("index,success_probability,walk_steps,oracle_queries\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                format_number(row.index),
                format_number(row.success_probability),
                row.walk_steps,
                format_number(row.oracle_queries),
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        // serialization of this shape cannot fail
        serde_json::to_string_pretty(self).expect("RunRecord is always serializable")
    }
}

/// Deterministic number formatting: integers bare, everything else in
/// scientific notation with 12 significant digits.
pub fn format_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 9e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.11e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record() -> RunRecord {
        let mut rec = RunRecord::new("test");
        rec.push_meta("m", 100);
        rec.push_row(RunRow {
            index: 0.0,
            success_probability: 1.0 / 101.0,
            walk_steps: 0,
            oracle_queries: 0.0,
        });
        rec.push_row(RunRow {
            index: 1.0,
            success_probability: 0.5,
            walk_steps: 22,
            oracle_queries: 1.0,
        });
        rec
    }

    #[test]
    fn ledger_invariant_by_construction() {
        let ledger = QueryLedger::new(14, 22);
        assert_eq!(ledger.walk_steps, 308);
        assert!(ledger.consistent());
    }

    #[test]
    fn csv_is_deterministic_and_has_header() {
        let a = sample_record().to_csv();
        let b = sample_record().to_csv();
        assert_eq!(a, b);
        assert!(a.starts_with("# module=test\n"));
        assert!(a.contains("index,success_probability,walk_steps,oracle_queries\n"));
        // integer index renders bare, probability renders scientific
        assert!(a.contains("\n0,9.90099009901e-3,0,0\n"), "csv was:\n{a}");
    }

    #[test]
    fn number_formatting_rules() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(42.0), "42");
        assert_eq!(format_number(-3.0), "-3");
        assert_eq!(format_number(0.5), "5.00000000000e-1");
        assert_eq!(format_number(1.0 / 3.0), "3.33333333333e-1");
    }

    #[test]
    fn validate_rejects_bad_probability_and_order() {
        let mut rec = sample_record();
        rec.validate().unwrap();
        rec.rows[1].success_probability = 1.5;
        assert!(rec.validate().is_err());
        let mut rec2 = sample_record();
        rec2.rows[1].index = 0.0;
        assert!(rec2.validate().is_err());
    }

    #[test]
    fn peak_breaks_ties_earliest() {
        let mut rec = RunRecord::new("test");
        for (i, p) in [0.1, 0.9, 0.9, 0.2].iter().enumerate() {
            rec.push_row(RunRow {
                index: i as f64,
                success_probability: *p,
                walk_steps: i as u64,
                oracle_queries: i as f64,
            });
        }
        assert_eq!(rec.peak().unwrap().index, 1.0);
        assert_eq!(rec.first_crossing(0.5).unwrap().index, 1.0);
        assert!(rec.first_crossing(0.95).is_none());
    }

    #[test]
    fn json_round_trips_rows() {
        let rec = sample_record();
        let json = rec.to_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["rows"].as_array().unwrap().len(), 2);
        assert_eq!(parsed["metadata"][0][1], "test");
    }
}
