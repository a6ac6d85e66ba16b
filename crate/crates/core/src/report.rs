//! CSV output: search traces, comparison tables, operator shares.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::alns::{DestroyOp, OperatorStats, TraceRow};
use crate::error::{Error, Result};
use crate::multitrip::GapReport;

pub fn write_trace<W: Write>(out: W, trace: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TraceRow::HEADER)?;
    for row in trace {
        w.write_record([
            row.iteration.to_string(),
            row.operator.to_string(),
            row.repair.to_string(),
            row.f_new.to_string(),
            row.f_current.to_string(),
            row.f_best.to_string(),
            u8::from(row.accepted).to_string(),
            row.temperature.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One instance of the comparison study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub network: String,
    pub capacity: f64,
    pub num_mhc: usize,
    pub nodes: usize,
    pub seed: u64,
    pub td_sync: f64,
    pub la_sync: f64,
    pub td_mt: f64,
    pub la_mt: f64,
    pub distance_gap: f64,
    pub arrival_gap: f64,
}

impl GapRow {
    pub fn new(network: impl Into<String>, capacity: f64, num_mhc: usize, nodes: usize, seed: u64, gap: &GapReport) -> Self {
        GapRow {
            network: network.into(),
            capacity,
            num_mhc,
            nodes,
            seed,
            td_sync: gap.td_sync,
            la_sync: gap.la_sync,
            td_mt: gap.td_mt,
            la_mt: gap.la_mt,
            distance_gap: gap.distance_gap,
            arrival_gap: gap.arrival_gap,
        }
    }

    fn values(&self) -> [f64; 6] {
        [
            self.td_sync,
            self.la_sync,
            self.td_mt,
            self.la_mt,
            self.distance_gap,
            self.arrival_gap,
        ]
    }
}

pub const GAP_HEADER: [&str; 11] = [
    "network",
    "capacity",
    "num_mhc",
    "nodes",
    "seed",
    "td_sync",
    "la_sync",
    "td_mt",
    "la_mt",
    "distance_gap",
    "arrival_gap",
];

const FOOTERS: [&str; 3] = ["Avg.", "Min.", "Max."];

/// Mean, minimum and maximum of each numeric column.
pub fn gap_footer(rows: &[GapRow]) -> [[f64; 6]; 3] {
    let mut sum = [0.0; 6];
    let mut min = [f64::INFINITY; 6];
    let mut max = [f64::NEG_INFINITY; 6];
    for row in rows {
        for (k, v) in row.values().into_iter().enumerate() {
            sum[k] += v;
            min[k] = min[k].min(v);
            max[k] = max[k].max(v);
        }
    }
    let n = rows.len().max(1) as f64;
    [sum.map(|s| s / n), min, max]
}

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

/// Writes the comparison table followed by Avg./Min./Max. rows.
pub fn write_gap_table<W: Write>(out: W, rows: &[GapRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(GAP_HEADER)?;
    for r in rows {
        let mut rec = vec![
            r.network.clone(),
            r.capacity.to_string(),
            r.num_mhc.to_string(),
            r.nodes.to_string(),
            r.seed.to_string(),
        ];
        rec.extend(r.values().map(fmt2));
        w.write_record(&rec)?;
    }
    if !rows.is_empty() {
        for (label, values) in FOOTERS.iter().zip(gap_footer(rows)) {
            let mut rec = vec![label.to_string(), String::new(), String::new(), String::new(), String::new()];
            rec.extend(values.map(fmt2));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Data rows of a table written by [`write_gap_table`]; footer rows are skipped.
pub fn read_gap_table(path: &Path) -> Result<Vec<GapRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if FOOTERS.contains(&rec.get(0).unwrap_or("")) {
            continue;
        }
        let field = |k: usize| rec.get(k).unwrap_or("");
        let num = |k: usize| -> Result<f64> {
            field(k).parse().map_err(|_| Error::Parse {
                line: i + 2,
                message: format!("column {} is not a number: {:?}", GAP_HEADER[k], field(k)),
            })
        };
        let int = |k: usize| -> Result<u64> {
            field(k).parse().map_err(|_| Error::Parse {
                line: i + 2,
                message: format!("column {} is not an integer: {:?}", GAP_HEADER[k], field(k)),
            })
        };
        rows.push(GapRow {
            network: field(0).to_string(),
            capacity: num(1)?,
            num_mhc: int(2)? as usize,
            nodes: int(3)? as usize,
            seed: int(4)?,
            td_sync: num(5)?,
            la_sync: num(6)?,
            td_mt: num(7)?,
            la_mt: num(8)?,
            distance_gap: num(9)?,
            arrival_gap: num(10)?,
        });
    }
    Ok(rows)
}

/// Writes `rows` to `path`; with `append`, rows already in the file are kept
/// and the footer is recomputed over all of them.
pub fn save_gap_table(path: &Path, rows: &[GapRow], append: bool) -> Result<()> {
    let mut all = if append && path.exists() { read_gap_table(path)? } else { Vec::new() };
    all.extend_from_slice(rows);
    write_gap_table(File::create(path)?, &all)
}

/// Share of new global bests found by each destroy operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorShare {
    pub operator: usize,
    pub name: String,
    pub count: usize,
    pub percentage: f64,
}

pub fn operator_shares<'a>(runs: impl IntoIterator<Item = &'a OperatorStats>) -> Vec<OperatorShare> {
    let mut counts = vec![0usize; DestroyOp::ALL.len()];
    for stats in runs {
        for (c, n) in counts.iter_mut().zip(&stats.new_best) {
            *c += n;
        }
    }
    let total: usize = counts.iter().sum();
    DestroyOp::ALL
        .iter()
        .zip(counts)
        .map(|(op, count)| OperatorShare {
            operator: op.id(),
            name: op.name().to_string(),
            count,
            percentage: if total == 0 { 0.0 } else { 100.0 * count as f64 / total as f64 },
        })
        .collect()
}

pub fn write_operator_shares<W: Write>(out: W, shares: &[OperatorShare]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["operator", "name", "count", "percentage"])?;
    for s in shares {
        w.write_record([s.operator.to_string(), s.name.clone(), s.count.to_string(), fmt2(s.percentage)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seed: u64, gap: GapReport) -> GapRow {
        GapRow::new("R", 22.0, 3, 30, seed, &gap)
    }

    #[test]
    fn trace_header_and_rows() {
        let trace = vec![TraceRow {
            iteration: 1,
            operator: 3,
            repair: 2,
            f_new: 10.5,
            f_current: 11.0,
            f_best: 10.5,
            accepted: true,
            temperature: 2.0,
        }];
        let mut buf = Vec::new();
        write_trace(&mut buf, &trace).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "iteration,operator,repair,f_new,f_current,f_best,accepted,temperature\n1,3,2,10.5,11,10.5,1,2\n"
        );
    }

    #[test]
    fn footer_statistics() {
        let rows = vec![
            row(1, GapReport::new(876.0, 465.0, 777.0, 554.0)),
            row(2, GapReport::new(100.0, 90.0, 100.0, 100.0)),
        ];
        let [avg, min, max] = gap_footer(&rows);
        assert!((avg[0] - 488.0).abs() < 1e-12);
        assert_eq!(min[1], 90.0);
        assert!((max[4] - 12.741312741312742).abs() < 1e-12);
    }

    #[test]
    fn append_keeps_rows_and_rewrites_footer() {
        let dir = std::env::temp_dir().join(format!("gap-table-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("gaps.csv");
        save_gap_table(&path, &[row(1, GapReport::new(876.0, 465.0, 777.0, 554.0))], false).unwrap();
        save_gap_table(&path, &[row(2, GapReport::new(100.0, 90.0, 100.0, 100.0))], true).unwrap();
        let back = read_gap_table(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].seed, 2);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.matches("Avg.").count(), 1);
        assert!(text.contains("12.74"));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn shares_sum_to_one_hundred() {
        let mut a = OperatorStats::default();
        a.new_best[0] = 3;
        a.new_best[6] = 1;
        let shares = operator_shares([&a, &a]);
        assert_eq!(shares[0].count, 6);
        assert!((shares.iter().map(|s| s.percentage).sum::<f64>() - 100.0).abs() < 1e-9);
        assert_eq!(shares[6].name, "after_resupply");
    }
}
