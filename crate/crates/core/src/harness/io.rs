//! File formats used by the command line tool.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::BinaryMatrix;

use super::batch::{BatchReport, RunRecord};
use super::growth::GrowthRow;

/// Reads either the matrix text format (first line holds the side) or an
/// edge list (first line holds `n m`).
pub fn parse_input(text: &str) -> Result<BinaryMatrix> {
    let header = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
    match header.split_whitespace().count() {
        1 => BinaryMatrix::parse_text(text),
        2 => Ok(Graph::parse_edge_list(text)?.adjacency()),
        k => Err(Error::Parse {
            line: 1,
            msg: format!("header has {k} fields, expected 1 (matrix) or 2 (edge list)"),
        }),
    }
}

/// One JSON object per line, in record order.
pub fn write_records_jsonl<W: Write>(records: &[RunRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records_jsonl<R: BufRead>(input: R) -> Result<Vec<RunRecord>> {
    let mut records = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: k + 1,
            msg: e.to_string(),
        })?);
    }
    Ok(records)
}

fn fmt_time(t: Option<f64>) -> String {
    t.map_or_else(|| "NA".to_string(), |t| format!("{t:.6}"))
}

#[derive(Serialize)]
struct SummaryRow {
    rho_b: f64,
    rho_c: f64,
    rho_a: f64,
    dim_b: usize,
    dim_c: usize,
    alpha: f64,
    n: usize,
    instances: usize,
    variations: usize,
    runs: usize,
    failures: usize,
    failure_pct: f64,
    t_min: String,
    t_avg_prime: String,
    t_avg: String,
    t_max: String,
}

/// Single-row CSV with header. Undefined times are written as `NA`.
pub fn write_summary_csv<W: Write>(report: &BatchReport, out: W) -> Result<()> {
    let s = &report.stats;
    let spec = &report.spec;
    let mut w = csv::Writer::from_writer(out);
    w.serialize(SummaryRow {
        rho_b: spec.rho_b,
        rho_c: spec.rho_c,
        rho_a: spec.rho_a(),
        dim_b: spec.dim_b,
        dim_c: spec.dim_c,
        alpha: spec.alpha(),
        n: spec.dim_b * spec.dim_c,
        instances: report.instances,
        variations: report.variations,
        runs: s.runs,
        failures: s.failures,
        failure_pct: s.failure_pct,
        t_min: fmt_time(s.t_min),
        t_avg_prime: fmt_time(s.t_avg_prime),
        t_avg: fmt_time(s.t_avg),
        t_max: fmt_time(s.t_max),
    })
    .map_err(csv_err)?;
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Whitespace separated `edges t_avg t_avg_prime` rows with a header line.
/// Undefined times are written as `nan`.
pub fn write_growth_dat<W: Write>(rows: &[GrowthRow], mut out: W) -> Result<()> {
    writeln!(out, "edges t_avg t_avg_prime")?;
    let f = |t: Option<f64>| t.map_or_else(|| "nan".to_string(), |t| format!("{t:.6}"));
    for r in rows {
        writeln!(out, "{:.3} {} {}", r.edges, f(r.t_avg), f(r.t_avg_prime))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::batch::BatchStats;
    use crate::harness::instance::InstanceSpec;
    use crate::permutation::Permutation;

    #[test]
    fn detects_both_formats() {
        let m = parse_input("2\n01\n10\n").unwrap();
        assert_eq!(m.to_row_strings(), vec!["01", "10"]);
        let g = parse_input("3 2\n0 1\n1 2\n").unwrap();
        assert_eq!(g.to_row_strings(), vec!["010", "001", "000"]);
        assert!(parse_input("").is_err());
        assert!(parse_input("1 2 3\n").is_err());
    }

    #[test]
    fn records_round_trip_with_row_strings() {
        let r = RunRecord {
            instance: 1,
            variation: 2,
            success: true,
            n1: 1,
            n2: 2,
            iterations: 3,
            restarts: 0,
            time_s: 0.25,
            p: Permutation::from_vec(vec![1, 0]).unwrap(),
            b: BinaryMatrix::ones(1),
            c: BinaryMatrix::identity(2),
        };
        let mut buf = Vec::new();
        write_records_jsonl(std::slice::from_ref(&r), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"c\":[\"10\",\"01\"]"));
        assert!(text.contains("\"p\":[1,0]"));
        assert_eq!(read_records_jsonl(&buf[..]).unwrap(), vec![r]);
    }

    #[test]
    fn summary_marks_missing_times() {
        let report = BatchReport {
            spec: InstanceSpec::new(2, 2, 0.5, 0.5, 0),
            instances: 1,
            variations: 1,
            records: vec![],
            stats: BatchStats::from_records(&[]),
            mean_edges: 0.0,
        };
        let mut buf = Vec::new();
        write_summary_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().ends_with("t_min,t_avg_prime,t_avg,t_max"));
        assert!(lines.next().unwrap().ends_with("NA,NA,NA,NA"));
    }

    #[test]
    fn growth_table_layout() {
        let rows = [GrowthRow {
            dim_c: 2,
            edges: 10.0,
            t_avg: Some(0.5),
            t_avg_prime: None,
            failure_pct: 0.0,
        }];
        let mut buf = Vec::new();
        write_growth_dat(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "edges t_avg t_avg_prime\n10.000 0.500000 nan\n"
        );
    }
}
