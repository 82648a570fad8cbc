//! `timeseries.csv`: one row per control sample.
//!
//! Columns are fixed: `t,x,xdot,xd,xddot,u,upsilon,uhat,epsilon,dhat,dtrue`,
//! followed by `Dhat_1..Dhat_N` when rule outputs are logged. `xddot` is the
//! reference velocity. Values carry 17 significant digits so that reading a
//! file back gives the logged values bit for bit.

use std::io::{Read, Write};

use thiserror::Error;

use crate::sim::SimRecord;

pub const COLUMNS: [&str; 11] = [
    "t", "x", "xdot", "xd", "xddot", "u", "upsilon", "uhat", "epsilon", "dhat", "dtrue",
];

#[derive(Debug, Error)]
pub enum TimeseriesError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeseriesRow {
    pub t: f64,
    pub x: f64,
    pub xdot: f64,
    pub xd: f64,
    pub xddot: f64,
    pub u: f64,
    pub upsilon: f64,
    pub uhat: f64,
    pub epsilon: f64,
    pub dhat: f64,
    pub dtrue: f64,
    pub rule_outputs: Vec<f64>,
}

impl From<&SimRecord> for TimeseriesRow {
    fn from(r: &SimRecord) -> Self {
        Self {
            t: r.t,
            x: r.state[0],
            xdot: r.state[1],
            xd: r.x_d[0],
            xddot: r.x_d[1],
            u: r.u,
            upsilon: r.upsilon,
            uhat: r.uhat,
            epsilon: r.epsilon,
            dhat: r.dhat,
            dtrue: r.d_true,
            rule_outputs: r.rule_outputs.clone().unwrap_or_default(),
        }
    }
}

impl TimeseriesRow {
    fn values(&self) -> [f64; 11] {
        [
            self.t, self.x, self.xdot, self.xd, self.xddot, self.u, self.upsilon, self.uhat,
            self.epsilon, self.dhat, self.dtrue,
        ]
    }
}

/// `%.17g`-equivalent scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn header(rule_count: usize) -> Vec<String> {
    COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain((1..=rule_count).map(|i| format!("Dhat_{i}")))
        .collect()
}

/// Writes the header and one row per record. `rule_count` is the number of
/// `Dhat_*` columns (0 to omit them); records must then carry snapshots.
pub fn write<W: Write>(out: W, records: &[SimRecord], rule_count: usize) -> Result<(), TimeseriesError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(rule_count))?;
    for (i, r) in records.iter().enumerate() {
        let row = TimeseriesRow::from(r);
        if rule_count > 0 && row.rule_outputs.len() != rule_count {
            return Err(TimeseriesError::Row {
                row: i + 1,
                reason: format!("expected {rule_count} rule outputs, got {}", row.rule_outputs.len()),
            });
        }
        let fields = row
            .values()
            .into_iter()
            .chain(row.rule_outputs.iter().copied().take(rule_count))
            .map(format_float);
        w.write_record(fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read<R: Read>(input: R) -> Result<Vec<TimeseriesRow>, TimeseriesError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let head: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    let rule_count = head.len().saturating_sub(COLUMNS.len());
    if head != header(rule_count) {
        return Err(TimeseriesError::Header(head));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let v = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| TimeseriesError::Row {
                row: i + 1,
                reason: e.to_string(),
            })?;
        rows.push(TimeseriesRow {
            t: v[0],
            x: v[1],
            xdot: v[2],
            xd: v[3],
            xddot: v[4],
            u: v[5],
            upsilon: v[6],
            uhat: v[7],
            epsilon: v[8],
            dhat: v[9],
            dtrue: v[10],
            rule_outputs: v[11..].to_vec(),
        });
    }
    Ok(rows)
}
