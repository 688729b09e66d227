//! CSV persistence, per-cell summaries and the significance report.
//!
//! Algorithm numbers in files are 1-based, matching the `j(+)` / `j(-)`
//! notation of the report.

use std::fmt;
use std::path::Path;

use super::experiment::{CellKey, RunRecord, RunTiming, RUNS_FILE, SUMMARY_FILE};
use super::stats::{kruskal_wallis, mean_std, pairwise_bonferroni, Comparison};
use crate::error::{format_real, CckpError, Result};

/// Significance level of the Kruskal-Wallis test and of the post-hoc family.
pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub enum CellStatus {
    Ok,
    /// Fewer feasible results than repetitions (missing runs, or runs that
    /// never found a feasible selection).
    Incomplete,
    Error(String),
}

impl CellStatus {
    fn token(&self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Incomplete => "incomplete",
            CellStatus::Error(_) => "error",
        }
    }
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellStatus::Error(m) => write!(f, "error: {m}"),
            other => f.write_str(other.token()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub cell: CellKey,
    pub expected_runs: usize,
    /// Best feasible profit of each run that found one, in repetition order.
    pub profits: Vec<f64>,
    pub mean: Option<f64>,
    /// Sample (n − 1) standard deviation.
    pub std: Option<f64>,
    pub status: CellStatus,
}

/// One summary row per cell, in the order of `cells`.
pub fn summarize(cells: &[CellKey], expected_runs: usize, runs: &[RunRecord]) -> Vec<SummaryRow> {
    cells
        .iter()
        .map(|cell| {
            let mut mine: Vec<&RunRecord> =
                runs.iter().filter(|r| r.cell.same_cell(cell)).collect();
            mine.sort_by_key(|r| r.rep);
            let profits: Vec<f64> = mine.iter().filter_map(|r| r.best_profit).collect();
            let stats = mean_std(&profits);
            let status = if profits.len() < expected_runs {
                CellStatus::Incomplete
            } else {
                CellStatus::Ok
            };
            SummaryRow {
                cell: cell.clone(),
                expected_runs,
                profits,
                mean: stats.map(|s| s.0),
                std: stats.map(|s| s.1),
                status,
            }
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(format_real).unwrap_or_default()
}

fn cell_fields(c: &CellKey) -> [String; 6] {
    [
        (c.algorithm_index + 1).to_string(),
        c.algorithm.clone(),
        c.instance.clone(),
        format_real(c.alpha),
        format_real(c.delta),
        c.bound.clone(),
    ]
}

const CELL_HEADER: [&str; 6] = ["algorithm", "label", "instance", "alpha", "delta", "bound"];

fn bad(line: u64, message: impl Into<String>) -> CckpError {
    CckpError::Parse {
        line: line as usize,
        message: message.into(),
    }
}

fn field(rec: &csv::StringRecord, i: usize) -> Result<&str> {
    let line = rec.position().map_or(0, |p| p.line());
    rec.get(i)
        .ok_or_else(|| bad(line, format!("missing column {}", i + 1)))
}

fn num<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let line = rec.position().map_or(0, |p| p.line());
    let s = field(rec, i)?;
    s.parse()
        .map_err(|_| bad(line, format!("cannot parse '{s}' in column {}", i + 1)))
}

fn opt_num(rec: &csv::StringRecord, i: usize) -> Result<Option<f64>> {
    if field(rec, i)?.is_empty() {
        Ok(None)
    } else {
        num(rec, i).map(Some)
    }
}

fn read_cell(rec: &csv::StringRecord) -> Result<CellKey> {
    let number: usize = num(rec, 0)?;
    if number == 0 {
        let line = rec.position().map_or(0, |p| p.line());
        return Err(bad(line, "algorithm numbers start at 1"));
    }
    Ok(CellKey {
        algorithm_index: number - 1,
        algorithm: field(rec, 1)?.to_string(),
        instance: field(rec, 2)?.to_string(),
        alpha: num(rec, 3)?,
        delta: num(rec, 4)?,
        bound: field(rec, 5)?.to_string(),
    })
}

pub fn write_runs(runs: &[RunRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = CELL_HEADER.to_vec();
    header.extend(["rep", "seed", "best_profit", "evaluations"]);
    w.write_record(&header)?;
    for r in runs {
        let mut row = cell_fields(&r.cell).to_vec();
        row.extend([
            r.rep.to_string(),
            r.seed.to_string(),
            opt(r.best_profit),
            r.evaluations.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push(RunRecord {
            cell: read_cell(&rec)?,
            rep: num(&rec, 6)?,
            seed: num(&rec, 7)?,
            best_profit: opt_num(&rec, 8)?,
            evaluations: num(&rec, 9)?,
        });
    }
    Ok(out)
}

pub fn write_timings(timings: &[RunTiming], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = CELL_HEADER.to_vec();
    header.extend(["rep", "wall_seconds"]);
    w.write_record(&header)?;
    for t in timings {
        let mut row = cell_fields(&t.cell).to_vec();
        row.extend([t.rep.to_string(), format_real(t.seconds)]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(rows: &[SummaryRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = CELL_HEADER.to_vec();
    header.extend([
        "runs",
        "expected_runs",
        "mean_profit",
        "std_profit_sample",
        "status",
        "note",
        "profits",
    ]);
    w.write_record(&header)?;
    for s in rows {
        let mut row = cell_fields(&s.cell).to_vec();
        let note = match &s.status {
            CellStatus::Error(m) => m.clone(),
            _ => String::new(),
        };
        let profits: Vec<String> = s.profits.iter().copied().map(format_real).collect();
        row.extend([
            s.profits.len().to_string(),
            s.expected_runs.to_string(),
            opt(s.mean),
            opt(s.std),
            s.status.token().to_string(),
            note,
            profits.join(";"),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary(path: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let profits_field = field(&rec, 12)?;
        let profits = if profits_field.is_empty() {
            Vec::new()
        } else {
            profits_field
                .split(';')
                .map(|p| {
                    p.parse()
                        .map_err(|_| bad(line, format!("cannot parse profit '{p}'")))
                })
                .collect::<Result<Vec<f64>>>()?
        };
        let status = match field(&rec, 10)? {
            "ok" => CellStatus::Ok,
            "incomplete" => CellStatus::Incomplete,
            "error" => CellStatus::Error(field(&rec, 11)?.to_string()),
            other => return Err(bad(line, format!("unknown status '{other}'"))),
        };
        out.push(SummaryRow {
            cell: read_cell(&rec)?,
            expected_runs: num(&rec, 7)?,
            profits,
            mean: opt_num(&rec, 8)?,
            std: opt_num(&rec, 9)?,
            status,
        });
    }
    Ok(out)
}

/// One algorithm's line in the significance report.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub summary: SummaryRow,
    /// Pairwise outcome against the other algorithms of the same setting,
    /// e.g. `"1(+) 3(-)"`.
    pub stat: String,
    /// Kruskal-Wallis `(H, p)` of the setting; shared by its rows.
    pub kruskal_wallis: Option<(f64, f64)>,
}

/// Groups summary rows by (instance, α, δ, bound) and compares the
/// algorithms of each setting. Rows without results are kept but left out
/// of the tests.
pub fn build_report(rows: &[SummaryRow]) -> Result<Vec<ReportRow>> {
    let mut settings: Vec<Vec<&SummaryRow>> = Vec::new();
    for row in rows {
        let same = |g: &Vec<&SummaryRow>| {
            let c = &g[0].cell;
            c.instance == row.cell.instance
                && c.alpha.to_bits() == row.cell.alpha.to_bits()
                && c.delta.to_bits() == row.cell.delta.to_bits()
                && c.bound == row.cell.bound
        };
        match settings.iter_mut().find(|g| same(g)) {
            Some(g) => g.push(row),
            None => settings.push(vec![row]),
        }
    }
    let mut out = Vec::new();
    for group in settings {
        let tested: Vec<usize> = (0..group.len())
            .filter(|&i| !group[i].profits.is_empty())
            .collect();
        let samples: Vec<Vec<f64>> = tested.iter().map(|&i| group[i].profits.clone()).collect();
        let (kw, matrix) = if samples.len() >= 2 {
            (
                Some(kruskal_wallis(&samples)?),
                Some(pairwise_bonferroni(&samples, SIGNIFICANCE)?),
            )
        } else {
            (None, None)
        };
        for (i, row) in group.iter().enumerate() {
            let stat = match (&matrix, tested.iter().position(|&t| t == i)) {
                (Some(m), Some(pos)) => m[pos]
                    .iter()
                    .enumerate()
                    .filter_map(|(j, c)| {
                        let number = group[tested[j]].cell.algorithm_index + 1;
                        match c {
                            Comparison::Better => Some(format!("{number}(+)")),
                            Comparison::Worse => Some(format!("{number}(-)")),
                            Comparison::Indistinguishable => None,
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" "),
                _ => String::new(),
            };
            out.push(ReportRow {
                summary: (*row).clone(),
                stat,
                kruskal_wallis: kw,
            });
        }
    }
    Ok(out)
}

pub fn write_report(rows: &[ReportRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = CELL_HEADER.to_vec();
    header.extend([
        "runs",
        "mean_profit",
        "std_profit_sample",
        "stat",
        "kw_h",
        "kw_p",
        "status",
    ]);
    w.write_record(&header)?;
    for r in rows {
        let s = &r.summary;
        let mut row = cell_fields(&s.cell).to_vec();
        row.extend([
            s.profits.len().to_string(),
            opt(s.mean),
            opt(s.std),
            r.stat.clone(),
            opt(r.kruskal_wallis.map(|k| k.0)),
            opt(r.kruskal_wallis.map(|k| k.1)),
            s.status.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Rebuilds the summary of an experiment directory from its `runs.csv`,
/// taking the cell list, expected run counts and errors from
/// `summary.csv`. Fails if the stored means or standard deviations
/// disagree with the recomputed ones by more than 1e-9.
pub fn summarize_dir(dir: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    let dir = dir.as_ref();
    let stored = read_summary(dir.join(SUMMARY_FILE))?;
    let runs = read_runs(dir.join(RUNS_FILE))?;
    let mut rows = Vec::with_capacity(stored.len());
    for old in stored {
        let mut row = summarize(std::slice::from_ref(&old.cell), old.expected_runs, &runs)
            .pop()
            .expect("one cell in, one row out");
        let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => (x - y).abs() <= 1e-9 * x.abs().max(1.0),
            (None, None) => true,
            _ => false,
        };
        if !close(old.mean, row.mean) || !close(old.std, row.std) {
            return Err(CckpError::Validation(format!(
                "stored summary of '{}' (alpha {}, delta {}, {}) disagrees with runs.csv",
                old.cell.algorithm, old.cell.alpha, old.cell.delta, old.cell.bound
            )));
        }
        if let CellStatus::Error(m) = old.status {
            row.status = CellStatus::Error(m);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// `stats` entry point: summary of `in_dir` plus significance report at `out`.
pub fn write_stats_report(
    in_dir: impl AsRef<Path>,
    out: impl AsRef<Path>,
) -> Result<Vec<ReportRow>> {
    let rows = summarize_dir(in_dir)?;
    let report = build_report(&rows)?;
    write_report(&report, out)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(i: usize, alpha: f64) -> CellKey {
        CellKey {
            algorithm_index: i,
            algorithm: format!("alg{i}"),
            instance: "inst".into(),
            alpha,
            delta: 25.0,
            bound: "chernoff".into(),
        }
    }

    fn record(cell: &CellKey, rep: usize, profit: Option<f64>) -> RunRecord {
        RunRecord {
            cell: cell.clone(),
            rep,
            seed: rep as u64,
            best_profit: profit,
            evaluations: 10,
        }
    }

    #[test]
    fn summary_accounting() {
        let a = key(0, 0.1);
        let runs: Vec<RunRecord> = [1.0, 2.0, 3.0]
            .iter()
            .enumerate()
            .map(|(i, &p)| record(&a, i, Some(p)))
            .collect();
        let rows = summarize(std::slice::from_ref(&a), 3, &runs);
        assert_eq!((rows[0].mean, rows[0].std), (Some(2.0), Some(1.0)));
        assert_eq!(rows[0].status, CellStatus::Ok);

        let rows = summarize(&[a.clone(), key(1, 0.1)], 4, &runs);
        assert_eq!(rows[0].status, CellStatus::Incomplete);
        assert_eq!(rows[1].status, CellStatus::Incomplete);
        assert_eq!((rows[1].mean, rows[1].std), (None, None));
    }

    #[test]
    fn report_notation_uses_algorithm_numbers() {
        let cells = [key(0, 0.1), key(1, 0.1), key(2, 0.1)];
        let mut runs = Vec::new();
        for rep in 0..10 {
            runs.push(record(&cells[0], rep, Some(rep as f64)));
            runs.push(record(&cells[1], rep, None));
            runs.push(record(&cells[2], rep, Some(100.0 + rep as f64)));
        }
        let report = build_report(&summarize(&cells, 10, &runs)).unwrap();
        assert_eq!(report[0].stat, "3(-)");
        assert_eq!(report[1].stat, "");
        assert_eq!(report[2].stat, "1(+)");
        assert!(report[0].kruskal_wallis.unwrap().1 < 0.05);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let a = key(0, 0.001);
        let runs = vec![record(&a, 0, Some(0.1 + 0.2)), record(&a, 1, None)];
        write_runs(&runs, dir.path().join(RUNS_FILE)).unwrap();
        assert_eq!(read_runs(dir.path().join(RUNS_FILE)).unwrap(), runs);
        let mut rows = summarize(std::slice::from_ref(&a), 2, &runs);
        rows.push(SummaryRow {
            status: CellStatus::Error("mu too small".into()),
            ..summarize(&[key(1, 0.001)], 2, &[]).remove(0)
        });
        write_summary(&rows, dir.path().join(SUMMARY_FILE)).unwrap();
        assert_eq!(read_summary(dir.path().join(SUMMARY_FILE)).unwrap(), rows);
        assert_eq!(summarize_dir(dir.path()).unwrap(), rows);
    }
}
