//! CSV emission of result tables and empirical CDFs.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::empirical_cdf;

/// One aggregated curve point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep: f64,
    pub scheme: String,
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Writes `rows` as headered CSV (`sweep,scheme,metric,mean,stderr,n`).
pub fn write_csv<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no result rows to write".into()));
    }
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    write_csv(rows, std::fs::File::create(path)?)
}

/// Writes the empirical CDF of `samples` as sorted `value,cdf` pairs.
pub fn write_cdf<W: Write>(samples: &[f64], writer: W) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("cannot build a CDF from no samples".into()));
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["value", "cdf"])?;
    for (v, p) in empirical_cdf(samples) {
        w.write_record([v.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_cdf(samples: &[f64], path: &Path) -> Result<()> {
    write_cdf(samples, std::fs::File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(sweep: f64) -> ResultRow {
        ResultRow {
            sweep,
            scheme: "PC-pi".into(),
            metric: "sum_rate".into(),
            mean: 1.5,
            stderr: 0.25,
            n: 4,
        }
    }

    #[test]
    fn csv_has_fixed_header_order() {
        let mut buf = Vec::new();
        write_csv(&[row(64.0), row(128.0)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("sweep,scheme,metric,mean,stderr,n"));
        assert_eq!(lines.next(), Some("64.0,PC-pi,sum_rate,1.5,0.25,4"));
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(write_csv(&[], Vec::new()).is_err());
        assert!(matches!(write_cdf(&[], Vec::new()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn constant_samples_give_a_single_step() {
        let mut buf = Vec::new();
        write_cdf(&[2.0, 2.0, 2.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(body, vec!["2,1"]);
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let err = emit_csv(&[row(1.0)], Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }
}
