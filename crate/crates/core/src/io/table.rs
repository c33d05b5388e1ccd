//! Comma-separated tables for sweep results.

use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{PreservationReport, SweepSummary};

pub const REPORT_HEADER: [&str; 5] = ["graph_id", "ratio", "method", "spectral_distance", "relative_mag_diff"];

pub const SUMMARY_HEADER: [&str; 16] = [
    "ratio", "method", "count", "failures", "mag_mean", "mag_std", "mag_q10", "mag_q25", "mag_q75", "mag_q90",
    "spec_mean", "spec_std", "spec_q10", "spec_q25", "spec_q75", "spec_q90",
];

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_reports<W: std::io::Write>(out: W, reports: &[PreservationReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER).map_err(csv_error)?;
    for r in reports {
        w.write_record([
            r.graph_id.to_string(),
            r.ratio.to_string(),
            r.method.to_string(),
            r.spectral_distance.to_string(),
            r.relative_mag_diff.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_reports<R: std::io::Read>(input: R, source: &str) -> Result<Vec<PreservationReport>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?;
    if !header.iter().eq(REPORT_HEADER) {
        return Err(Error::SchemaMismatch(format!("{source}: unexpected header {header:?}")));
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(csv_error)?;
            let line = i + 2;
            let bad = |what: &str| Error::MalformedLine {
                file: source.to_string(),
                line,
                reason: format!("invalid {what}"),
            };
            if rec.len() != REPORT_HEADER.len() {
                return Err(bad("field count"));
            }
            Ok(PreservationReport {
                graph_id: rec[0].parse().map_err(|_| bad("graph_id"))?,
                ratio: rec[1].parse().map_err(|_| bad("ratio"))?,
                method: rec[2].parse().map_err(|_| bad("method"))?,
                spectral_distance: rec[3].parse().map_err(|_| bad("spectral_distance"))?,
                relative_mag_diff: rec[4].parse().map_err(|_| bad("relative_mag_diff"))?,
            })
        })
        .collect()
}

pub fn write_reports_file(path: &Path, reports: &[PreservationReport]) -> Result<()> {
    write_reports(std::fs::File::create(path)?, reports)
}

pub fn read_reports_file(path: &Path) -> Result<Vec<PreservationReport>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    read_reports(std::fs::File::open(path)?, &path.display().to_string())
}

/// Per-(ratio, method) aggregates; empty groups leave the statistics blank.
pub fn write_summaries<W: std::io::Write>(out: W, summaries: &[SweepSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER).map_err(csv_error)?;
    for s in summaries {
        let mut row = vec![s.ratio.to_string(), s.method.to_string(), s.count.to_string(), s.failures.to_string()];
        for stats in [&s.relative_mag_diff, &s.spectral_distance] {
            match stats {
                Some(x) => row.extend([x.mean, x.std, x.q10, x.q25, x.q75, x.q90].map(|v| v.to_string())),
                None => row.extend(std::iter::repeat_n(String::new(), 6)),
            }
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
