//! Output formatting shared by the command-line front end: CSV tables and
//! JSON documents with the precision conventions used throughout (estimates
//! to 4 decimals, exact conformal values to 10 significant digits).

use std::collections::BTreeMap;

use crate::estimate::{EstimateResult, HomologyTally};
use crate::{Error, Result};

/// Monte Carlo estimate, 4 decimals.
pub fn fmt_estimate(x: f64) -> String {
    format!("{x:.4}")
}

/// Exact (conformal) value, 10 significant digits, plain notation.
pub fn fmt_exact(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (9 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// A rectangular table with named columns; the common denominator of every
/// CSV the tool emits.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: Vec<S>) -> Result<()> {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        if row.len() != self.columns.len() {
            return Err(Error::Contract(format!(
                "row width {} != column count {}",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Serialize to CSV. `header_comment` lines (resolved config, seed) are
    /// prefixed with '#' so downstream parsers can skip them.
    pub fn to_csv(&self, header_comment: &[String]) -> String {
        let mut out = String::new();
        for line in header_comment {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Named crossing estimates as a CSV table: name,successes,trials,p_hat,ci95.
pub fn battery_table(results: &BTreeMap<String, EstimateResult>) -> CsvTable {
    let mut t = CsvTable::new(vec!["name", "successes", "trials", "p_hat", "ci95"]);
    for (name, e) in results {
        t.push(vec![
            name.clone(),
            e.successes.to_string(),
            e.trials.to_string(),
            fmt_estimate(e.p_hat),
            fmt_estimate(e.ci95),
        ])
        .expect("fixed width");
    }
    t
}

/// Torus homology class label: "H" for the full group, "0" for the trivial
/// one, "(m,n)" for the cyclic class generated by a primitive (m, n).
pub fn class_label(class: Option<(i64, i64)>) -> String {
    match class {
        None => "H".into(),
        Some((0, 0)) => "0".into(),
        Some((m, n)) => format!("({m},{n})"),
    }
}

/// Homology tallies as a CSV table, full class first, cyclic classes in
/// lexicographic order, trivial class last.
pub fn homology_table(tally: &HomologyTally) -> CsvTable {
    let mut t = CsvTable::new(vec!["class", "count", "p_hat", "ci95"]);
    let mut push = |label: String, count: u64| {
        let e = EstimateResult::from_counts(count, tally.trials);
        t.push(vec![
            label,
            count.to_string(),
            fmt_estimate(e.p_hat),
            fmt_estimate(e.ci95),
        ])
        .expect("fixed width");
    };
    push(class_label(None), tally.full);
    for (&(m, n), &c) in &tally.cyclic {
        push(class_label(Some((m, n))), c);
    }
    push(class_label(Some((0, 0))), tally.trivial);
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_formatting_examples() {
        assert_eq!(fmt_exact(0.5), "0.5000000000");
        assert_eq!(fmt_exact(0.0), "0");
        assert_eq!(fmt_exact(1.0), "1.000000000");
        assert_eq!(fmt_exact(0.3223), "0.3223000000");
        assert_eq!(fmt_exact(12.5), "12.50000000");
        assert_eq!(fmt_exact(-0.5), "-0.5000000000");
    }

    #[test]
    fn estimate_formatting() {
        assert_eq!(fmt_estimate(0.5), "0.5000");
        assert_eq!(fmt_estimate(0.32225), "0.3222");
    }

    #[test]
    fn csv_shape_and_comments() {
        let mut results = BTreeMap::new();
        results.insert("h".to_string(), EstimateResult::from_counts(50, 100));
        let t = battery_table(&results);
        let csv = t.to_csv(&["seed=1".to_string()]);
        assert_eq!(
            csv,
            "# seed=1\nname,successes,trials,p_hat,ci95\nh,50,100,0.5000,0.0980\n"
        );
    }

    #[test]
    fn ragged_row_rejected() {
        let mut t = CsvTable::new(vec!["a", "b"]);
        assert!(t.push(vec!["1"]).is_err());
        assert!(t.push(vec!["1", "2"]).is_ok());
    }

    #[test]
    fn homology_table_layout() {
        let mut tally = HomologyTally {
            trials: 10,
            full: 3,
            trivial: 4,
            ..Default::default()
        };
        tally.cyclic.insert((0, 1), 1);
        tally.cyclic.insert((1, 0), 2);
        let t = homology_table(&tally);
        let classes: Vec<&str> = t.rows.iter().map(|r| r[0].as_str()).collect();
        assert_eq!(classes, ["H", "(0,1)", "(1,0)", "0"]);
        let counts: u64 = t.rows.iter().map(|r| r[1].parse::<u64>().unwrap()).sum();
        assert_eq!(counts, 10);
    }

    #[test]
    fn csv_table_json_roundtrip() {
        let mut t = CsvTable::new(vec!["x"]);
        t.push(vec!["1"]).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        let back: CsvTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
