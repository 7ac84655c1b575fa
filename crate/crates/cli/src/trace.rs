//! Trace files: a version line naming the problem, then a CSV table.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use tteig::solver::IterationRecord;

use crate::config::FORMAT_VERSION;
use crate::failure::Failure;

const TRACE_TAG: &str = "# tteig-trace v";
const COMPARE_TAG: &str = "# tteig-compare v";

pub fn header(m: usize) -> Vec<String> {
    let mut h = vec!["iter".to_string()];
    h.extend((1..=m).map(|j| format!("lambda_{j}")));
    h.extend((1..=m).map(|j| format!("res_{j}")));
    h.extend((1..=m).map(|j| format!("rank_{j}")));
    h.extend(["trunc_err", "a", "b", "seconds"].map(String::from));
    h
}

fn row(r: &IterationRecord, m: usize) -> Vec<String> {
    let pad = |x: Option<String>| x.unwrap_or_else(|| "NaN".into());
    let mut out = vec![r.iter.to_string()];
    out.extend((0..m).map(|j| pad(r.ritz_values.get(j).map(f64::to_string))));
    out.extend((0..m).map(|j| pad(r.residuals.get(j).map(f64::to_string))));
    out.extend((0..m).map(|j| r.ranks.get(j).map_or_else(|| "0".into(), usize::to_string)));
    out.extend([r.trunc_err, r.a, r.b, r.seconds].map(|x| x.to_string()));
    out
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::io(format!("{}: {e}", path.display()))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Failure + '_ {
    move |e| Failure::io(format!("{}: {e}", path.display()))
}

pub fn write_trace(path: &Path, problem_json: &str, m: usize, records: &[IterationRecord]) -> Result<(), Failure> {
    let mut file = std::fs::File::create(path).map_err(io(path))?;
    writeln!(file, "{TRACE_TAG}{FORMAT_VERSION} problem={problem_json}").map_err(io(path))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header(m)).map_err(csv_err(path))?;
    for r in records {
        w.write_record(row(r, m)).map_err(csv_err(path))?;
    }
    w.flush().map_err(io(path))
}

/// A trace read back from disk.
#[derive(Clone, Debug)]
pub struct TraceFile {
    pub name: String,
    pub problem: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn read_trace(path: &Path) -> Result<TraceFile, Failure> {
    let mut reader = BufReader::new(std::fs::File::open(path).map_err(io(path))?);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(io(path))?;
    let problem = first
        .trim_end()
        .strip_prefix(TRACE_TAG)
        .and_then(|rest| rest.split_once(" problem="))
        .filter(|(v, _)| v.parse::<u32>() == Ok(FORMAT_VERSION))
        .map(|(_, p)| p.to_string())
        .ok_or_else(|| Failure::config(format!("{} is not a version {FORMAT_VERSION} trace", path.display())))?;
    let mut csv = csv::Reader::from_reader(reader);
    let columns: Vec<String> = csv.headers().map_err(csv_err(path))?.iter().map(String::from).collect();
    if columns.first().map(String::as_str) != Some("iter") {
        return Err(Failure::config(format!("{}: first column must be iter", path.display())));
    }
    let rows = csv
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()))
        .collect::<Result<Vec<Vec<String>>, _>>()
        .map_err(csv_err(path))?;
    let name = path.file_stem().map_or_else(|| "trace".into(), |s| s.to_string_lossy().trim_end_matches(".trace").to_string());
    Ok(TraceFile { name, problem, columns, rows })
}

/// Aligns traces of the same problem by iteration. Columns are prefixed with
/// the trace name; iterations missing from a trace are left empty.
pub fn compare(paths: &[PathBuf]) -> Result<String, Failure> {
    if paths.is_empty() {
        return Err(Failure::config("compare needs at least one trace".into()));
    }
    let mut traces = paths.iter().map(|p| read_trace(p)).collect::<Result<Vec<_>, _>>()?;
    let problem = traces[0].problem.clone();
    if let Some(t) = traces.iter().find(|t| t.problem != problem) {
        return Err(Failure::config(format!("incompatible problems: {} vs {}", problem, t.problem)));
    }
    for i in 1..traces.len() {
        if traces[..i].iter().any(|t| t.name == traces[i].name) {
            traces[i].name = format!("{}#{}", traces[i].name, i + 1);
        }
    }
    let mut header = vec!["iter".to_string()];
    let mut table: BTreeMap<u64, Vec<String>> = BTreeMap::new();
    let width: usize = traces.iter().map(|t| t.columns.len() - 1).sum();
    let mut offset = 0;
    for t in &traces {
        header.extend(t.columns[1..].iter().map(|c| format!("{}:{c}", t.name)));
        for r in &t.rows {
            let iter: u64 = r[0].parse().map_err(|_| Failure::config(format!("{}: bad iteration {}", t.name, r[0])))?;
            let line = table.entry(iter).or_insert_with(|| vec![String::new(); width]);
            for (k, v) in r[1..].iter().enumerate() {
                line[offset + k] = v.clone();
            }
        }
        offset += t.columns.len() - 1;
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::io(e.to_string());
    w.write_record(&header).map_err(fail)?;
    for (iter, line) in table {
        w.write_record(std::iter::once(iter.to_string()).chain(line)).map_err(fail)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| Failure::io(e.to_string()))?).expect("csv output is utf-8");
    Ok(format!("{COMPARE_TAG}{FORMAT_VERSION} problem={problem}\n{body}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(iter: usize) -> IterationRecord {
        IterationRecord {
            iter,
            ritz_values: vec![1.0 / iter as f64],
            max_imag: 0.0,
            residuals: vec![0.5],
            ranks: vec![2],
            trunc_err: 1e-3,
            a: f64::NAN,
            b: f64::NAN,
            seconds: 0.25,
            locked: 0,
            dropped: 0,
            reseeded: 0,
        }
    }

    #[test]
    fn header_layout() {
        assert_eq!(header(2), ["iter", "lambda_1", "lambda_2", "res_1", "res_2", "rank_1", "rank_2", "trunc_err", "a", "b", "seconds"]);
    }

    #[test]
    fn round_trip_and_self_compare() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.trace.csv");
        write_trace(&p, "{\"kind\":\"laplacian\"}", 1, &[record(1), record(2)]).unwrap();
        let t = read_trace(&p).unwrap();
        assert_eq!(t.name, "x");
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[1][1], "0.5");
        let merged = compare(&[p.clone(), p]).unwrap();
        let lines: Vec<&str> = merged.lines().collect();
        assert!(lines[1].starts_with("iter,x:lambda_1"));
        assert!(lines[1].contains("x#2:lambda_1"));
        let cells: Vec<&str> = lines[2].split(',').collect();
        let half = (cells.len() - 1) / 2;
        assert_eq!(cells[1..=half], cells[half + 1..]);
    }

    #[test]
    fn different_problems_are_incompatible() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.trace.csv");
        let q = dir.path().join("b.trace.csv");
        write_trace(&p, "{\"n\":1}", 1, &[record(1)]).unwrap();
        write_trace(&q, "{\"n\":2}", 1, &[record(1)]).unwrap();
        assert!(compare(&[p, q]).unwrap_err().message.contains("incompatible"));
    }
}
