use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::dataset::{Row, RowKey};
use super::CliError;

/// Absolute gap always accepted between a reference value and an estimate.
pub const ABS_TOLERANCE: f64 = 0.03;
/// Accepted gap in standard errors of the estimate.
pub const SE_MULTIPLE: f64 = 3.0;

pub fn tolerance(std_err: f64) -> f64 {
    ABS_TOLERANCE.max(SE_MULTIPLE * std_err)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparedRow {
    pub key: RowKey,
    pub reference: Option<f64>,
    pub test: Option<f64>,
    pub gap: f64,
    pub std_err: f64,
    /// Gap over standard error; infinite for a nonzero gap with zero error.
    pub ratio: f64,
    pub passed: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub rows: Vec<ComparedRow>,
    pub passed: bool,
}

impl CompareReport {
    /// Failing rows first, then the rest, each ordered by gap relative to
    /// its tolerance.
    pub fn worst(&self, n: usize) -> Vec<&ComparedRow> {
        let mut v: Vec<&ComparedRow> = self.rows.iter().collect();
        let score = |r: &ComparedRow| {
            if r.reference.is_none() || r.test.is_none() {
                f64::INFINITY
            } else {
                r.gap / tolerance(r.std_err)
            }
        };
        v.sort_by(|a, b| a.passed.cmp(&b.passed).then(score(b).total_cmp(&score(a))));
        v.truncate(n);
        v
    }

    pub fn render(&self, n_worst: usize) -> String {
        let mut s = String::new();
        let failed = self.rows.iter().filter(|r| !r.passed).count();
        let _ = writeln!(
            s,
            "{} rows compared, {} outside max({}, {}·SE): {}",
            self.rows.len(),
            failed,
            ABS_TOLERANCE,
            SE_MULTIPLE,
            if self.passed { "PASS" } else { "FAIL" }
        );
        if !self.rows.is_empty() {
            let _ = writeln!(s, "worst offenders:");
            for r in self.worst(n_worst) {
                let f = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    s,
                    "  {} {}: reference {} test {} gap {:.3e} se {:.3e} gap/se {:.2}{}",
                    if r.passed { "ok  " } else { "FAIL" },
                    r.key,
                    f(r.reference),
                    f(r.test),
                    r.gap,
                    r.std_err,
                    r.ratio,
                    r.note.as_ref().map(|n| format!(" ({n})")).unwrap_or_default()
                );
            }
        }
        s
    }
}

fn index(rows: &[Row], side: &str) -> Result<BTreeMap<RowKey, Row>, CliError> {
    let mut map = BTreeMap::new();
    for r in rows {
        let key = r.key();
        if map.insert(key.clone(), r.clone()).is_some() {
            return Err(CliError::Usage(format!("{side} has more than one row for {key}")));
        }
    }
    Ok(map)
}

/// Pair rows by key and check every gap against `max(0.03, 3·SE)`, the
/// standard error being the test row's (else the reference row's).
pub fn compare_rows(reference: &[Row], test: &[Row]) -> Result<CompareReport, CliError> {
    let a = index(reference, "reference")?;
    let b = index(test, "test")?;
    let only_a: Vec<&RowKey> = a.keys().filter(|k| !b.contains_key(*k)).collect();
    let only_b: Vec<&RowKey> = b.keys().filter(|k| !a.contains_key(*k)).collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        let mut msg = String::from("row keys differ");
        if let Some(k) = only_a.first() {
            let _ = write!(msg, "; {} only in the reference (first: {k})", only_a.len());
        }
        if let Some(k) = only_b.first() {
            let _ = write!(msg, "; {} only in the test set (first: {k})", only_b.len());
        }
        return Err(CliError::Mismatch(msg));
    }
    let mut rows = Vec::new();
    for (key, ra) in &a {
        let rb = &b[key];
        let std_err = rb.std_err.or(ra.std_err).unwrap_or(0.0);
        let (gap, passed, note) = match (ra.value, rb.value) {
            (Some(x), Some(y)) => {
                let gap = (x - y).abs();
                (gap, gap <= tolerance(std_err), None)
            }
            _ => {
                let note = ra.error.clone().or_else(|| rb.error.clone()).unwrap_or_else(|| "missing value".into());
                (f64::NAN, false, Some(note))
            }
        };
        let ratio = if gap == 0.0 {
            0.0
        } else if std_err > 0.0 {
            gap / std_err
        } else {
            f64::INFINITY
        };
        rows.push(ComparedRow {
            key: key.clone(),
            reference: ra.value,
            test: rb.value,
            gap,
            std_err,
            ratio,
            passed,
            note,
        });
    }
    let passed = rows.iter().all(|r| r.passed);
    Ok(CompareReport { rows, passed })
}

/// Split rows of a mixed dataset into analytic and simulated halves.
pub fn split_methods(rows: &[Row]) -> (Vec<Row>, Vec<Row>) {
    rows.iter().cloned().partition(|r| r.method == "analytic")
}

/// Rows of the given method when the file contains any, all rows otherwise.
pub fn prefer_method(rows: &[Row], method: &str) -> Vec<Row> {
    if rows.iter().any(|r| r.method == method) {
        rows.iter().filter(|r| r.method == method).cloned().collect()
    } else {
        rows.to_vec()
    }
}
