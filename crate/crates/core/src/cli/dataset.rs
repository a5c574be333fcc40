//! CSV schema of sweep output.
//!
//! Columns, in order:
//!
//! | column        | meaning                                                       |
//! |---------------|---------------------------------------------------------------|
//! | `curve`       | overrides applied on top of the base parameters (`k=v;k=v`)   |
//! | `swept_key`   | configuration key varied along the grid                       |
//! | `swept_value` | value of the swept key                                        |
//! | `gamma_db`    | SINR threshold in dB                                          |
//! | `output`      | quantity (`p_d2d`, `outage_c`, `laplace_cc`, ...)             |
//! | `method`      | `analytic` or `mc`                                            |
//! | `value`       | result, blank on error                                        |
//! | `std_err`     | Monte Carlo standard error, blank for analytic rows           |
//! | `wall_ms`     | compute time, blank unless timing was requested              |
//! | `error`       | error message, blank on success                               |
//!
//! Lines starting with `#` before the header carry run metadata.

use std::io::{BufRead, Write};

use super::CliError;

pub const HEADER: [&str; 10] = [
    "curve",
    "swept_key",
    "swept_value",
    "gamma_db",
    "output",
    "method",
    "value",
    "std_err",
    "wall_ms",
    "error",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub curve: String,
    pub swept_key: String,
    pub swept_value: f64,
    pub gamma_db: f64,
    pub output: String,
    pub method: String,
    pub value: Option<f64>,
    pub std_err: Option<f64>,
    pub wall_ms: Option<f64>,
    pub error: Option<String>,
}

/// Identity of a row apart from the method that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowKey {
    pub curve: String,
    pub swept_key: String,
    pub swept_value: String,
    pub gamma_db: String,
    pub output: String,
}

impl std::fmt::Display for RowKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {}={} gamma_db={} {}",
            if self.curve.is_empty() { "-" } else { &self.curve },
            self.swept_key,
            self.swept_value,
            self.gamma_db,
            self.output
        )
    }
}

impl Row {
    pub fn key(&self) -> RowKey {
        RowKey {
            curve: self.curve.clone(),
            swept_key: self.swept_key.clone(),
            swept_value: fmt_num(self.swept_value),
            gamma_db: fmt_num(self.gamma_db),
            output: self.output.clone(),
        }
    }

    fn record(&self) -> [String; 10] {
        let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
        [
            self.curve.clone(),
            self.swept_key.clone(),
            fmt_num(self.swept_value),
            fmt_num(self.gamma_db),
            self.output.clone(),
            self.method.clone(),
            opt(self.value),
            opt(self.std_err),
            opt(self.wall_ms),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// Shortest representation that parses back to the same value.
pub fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    /// Metadata lines, written without the leading `# `.
    pub metadata: Vec<String>,
    pub rows: Vec<Row>,
}

impl Dataset {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        for line in &self.metadata {
            write!(out, "# {line}\r\n")?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
        w.write_record(HEADER)?;
        for row in &self.rows {
            w.write_record(row.record())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Dataset, CliError> {
        let mut metadata = Vec::new();
        let mut body = Vec::new();
        let mut in_header = true;
        for line in input.lines() {
            let line = line?;
            if in_header {
                if let Some(m) = line.strip_prefix('#') {
                    metadata.push(m.strip_prefix(' ').unwrap_or(m).to_string());
                    continue;
                }
                in_header = false;
            }
            body.push(line);
        }
        let text = body.join("\n");
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != HEADER {
            return Err(CliError::Usage(format!(
                "unexpected CSV header `{}`; expected `{}`",
                header.join(","),
                HEADER.join(",")
            )));
        }
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let num = |idx: usize| -> Result<Option<f64>, CliError> {
                let s = rec.get(idx).unwrap_or("");
                if s.is_empty() {
                    return Ok(None);
                }
                s.parse::<f64>()
                    .map(Some)
                    .map_err(|_| CliError::Usage(format!("row {line}: `{s}` in column {} is not a number", HEADER[idx])))
            };
            let required = |idx: usize| -> Result<f64, CliError> {
                num(idx)?.ok_or_else(|| CliError::Usage(format!("row {line}: column {} is empty", HEADER[idx])))
            };
            let text = |idx: usize| rec.get(idx).unwrap_or("").to_string();
            let error = text(9);
            rows.push(Row {
                curve: text(0),
                swept_key: text(1),
                swept_value: required(2)?,
                gamma_db: required(3)?,
                output: text(4),
                method: text(5),
                value: num(6)?,
                std_err: num(7)?,
                wall_ms: num(8)?,
                error: if error.is_empty() { None } else { Some(error) },
            });
        }
        Ok(Dataset { metadata, rows })
    }
}
