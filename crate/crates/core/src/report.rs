//! CSV and JSON serialization of [`RegretRecord`]s.
//!
//! CSV floats carry 9 significant digits and `+∞` is written `inf`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulation::{ExperimentConfig, RegretRecord};

pub const CSV_HEADER: [&str; 9] =
    ["distribution", "estimator", "k", "n", "trials", "seed", "mean_kl_nats", "stderr_nats", "inf_trials"];

/// Significant digits of CSV floating-point columns.
pub const CSV_DIGITS: usize = 9;

/// Formats `x` with `digits` significant digits: fixed notation for
/// decimal exponents in `-5..digits`, scientific otherwise. Zero is `0`,
/// infinities are `inf` / `-inf`.
pub fn format_significant(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        format!("{:.*}", (digits as i32 - 1 - exp) as usize, x)
    } else {
        sci
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

pub fn write_csv<W: Write>(records: &[RegretRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.distribution.clone(),
            r.estimator.clone(),
            r.k.to_string(),
            r.n.to_string(),
            r.trials.to_string(),
            r.master_seed.to_string(),
            format_significant(r.mean_kl, CSV_DIGITS),
            format_significant(r.stderr, CSV_DIGITS),
            r.inf_trials.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(())
}

pub fn to_csv_string(records: &[RegretRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RegretRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!("unexpected csv header: {}", header.iter().collect::<Vec<_>>().join(","))));
    }
    let field = |row: &csv::StringRecord, i: usize| row.get(i).unwrap_or_default().to_string();
    fn num<T: std::str::FromStr>(s: &str, col: &str) -> Result<T> {
        s.parse().map_err(|_| Error::Config(format!("bad value `{s}` in column {col}")))
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        out.push(RegretRecord {
            distribution: field(&row, 0),
            estimator: field(&row, 1),
            k: num(&field(&row, 2), "k")?,
            n: num(&field(&row, 3), "n")?,
            trials: num(&field(&row, 4), "trials")?,
            master_seed: num(&field(&row, 5), "seed")?,
            mean_kl: num(&field(&row, 6), "mean_kl_nats")?,
            stderr: num(&field(&row, 7), "stderr_nats")?,
            inf_trials: num(&field(&row, 8), "inf_trials")?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub units: String,
    /// Whether estimators in a cell were scored on shared samples.
    pub paired_samples: bool,
    pub rng: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub metadata: ReportMetadata,
    pub records: Vec<RegretRecord>,
}

impl JsonReport {
    pub fn new(config: &ExperimentConfig, records: Vec<RegretRecord>) -> Self {
        JsonReport {
            metadata: ReportMetadata {
                units: "nats".into(),
                paired_samples: true,
                rng: "ChaCha8, key = seed_from_u64(seed), stream = trial index".into(),
                config: config.clone(),
            },
            records,
        }
    }
}

pub fn write_json<W: Write>(report: &JsonReport, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, report).map_err(|e| Error::Config(format!("json: {e}")))
}
