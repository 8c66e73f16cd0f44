//! Run records, CSV output and the aggregated text table.
//!
//! CSV columns, in order: `instance, group, problem, mode, seed, cost,
//! distance, routes, cpu_s, gap_pct, pct_dist_other, feasible`. Costs,
//! distances, times and percentages are written with two decimals; a missing
//! gap or percentage is written as `–`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::instance::ProblemKind;
use crate::orchestrator::Mode;

pub const MISSING: &str = "–";

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub group: String,
    pub kind: ProblemKind,
    pub seed: u64,
    pub mode: Mode,
    pub cost: f64,
    pub distance: f64,
    pub routes: usize,
    pub cpu_seconds: f64,
    pub gap: Option<f64>,
    pub percent_dist: Option<f64>,
    pub feasible: bool,
}

/// Group label of an instance name: `UK10_03-B` belongs to `UK10-B`,
/// `C12` to `C`, `G4` to `G`.
pub fn group_of(name: &str) -> String {
    if let Some((head, tail)) = name.split_once('_') {
        match tail.rsplit_once('-') {
            Some((_, suffix)) => format!("{head}-{suffix}"),
            None => head.to_string(),
        }
    } else {
        name.trim_end_matches(|c: char| c.is_ascii_digit()).to_string()
    }
}

/// Sort key placing `C2` before `C10`.
fn natural_key(s: &str) -> Vec<(String, u64)> {
    let mut out = Vec::new();
    let mut text = String::new();
    let mut digits = String::new();
    for c in s.chars() {
        if c.is_ascii_digit() {
            digits.push(c);
        } else {
            if !digits.is_empty() {
                out.push((std::mem::take(&mut text), digits.parse().unwrap_or(u64::MAX)));
                digits.clear();
            }
            text.push(c);
        }
    }
    out.push((text, digits.parse().unwrap_or(0)));
    out
}

fn fmt2(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt2).unwrap_or_else(|| MISSING.to_string())
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut k) = (0.0, 0usize);
    for x in xs {
        sum += x;
        k += 1;
    }
    (k > 0).then(|| sum / k as f64)
}

fn sorted(records: &[RunRecord]) -> Vec<&RunRecord> {
    let mut rs: Vec<&RunRecord> = records.iter().collect();
    rs.sort_by(|a, b| {
        natural_key(&a.group)
            .cmp(&natural_key(&b.group))
            .then_with(|| natural_key(&a.instance).cmp(&natural_key(&b.instance)))
            .then_with(|| a.kind.as_str().cmp(b.kind.as_str()))
            .then_with(|| a.mode.as_str().cmp(b.mode.as_str()))
            .then(a.seed.cmp(&b.seed))
    });
    rs
}

pub fn write_csv(records: &[RunRecord], sink: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([
        "instance",
        "group",
        "problem",
        "mode",
        "seed",
        "cost",
        "distance",
        "routes",
        "cpu_s",
        "gap_pct",
        "pct_dist_other",
        "feasible",
    ])?;
    for r in sorted(records) {
        w.write_record([
            r.instance.clone(),
            r.group.clone(),
            r.kind.to_string(),
            r.mode.as_str().to_string(),
            r.seed.to_string(),
            fmt2(r.cost),
            fmt2(r.distance),
            r.routes.to_string(),
            fmt2(r.cpu_seconds),
            fmt_opt(r.gap),
            fmt_opt(r.percent_dist),
            r.feasible.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Averages of one instance over its runs.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceSummary {
    pub instance: String,
    pub group: String,
    pub kind: ProblemKind,
    pub mode: Mode,
    pub runs: usize,
    pub avg_cost: f64,
    pub best_cost: f64,
    pub avg_distance: f64,
    pub avg_routes: f64,
    pub avg_cpu: f64,
    pub avg_gap: Option<f64>,
}

pub fn summarize(records: &[RunRecord]) -> Vec<InstanceSummary> {
    let mut out: Vec<InstanceSummary> = Vec::new();
    let rs = sorted(records);
    let mut start = 0;
    while start < rs.len() {
        let head = rs[start];
        let same = |r: &&&RunRecord| r.instance == head.instance && r.kind == head.kind && r.mode == head.mode;
        let end = start + rs[start..].iter().take_while(same).count();
        let chunk = &rs[start..end];
        out.push(InstanceSummary {
            instance: head.instance.clone(),
            group: head.group.clone(),
            kind: head.kind,
            mode: head.mode,
            runs: chunk.len(),
            avg_cost: mean(chunk.iter().map(|r| r.cost)).unwrap_or(f64::NAN),
            best_cost: chunk.iter().map(|r| r.cost).fold(f64::INFINITY, f64::min),
            avg_distance: mean(chunk.iter().map(|r| r.distance)).unwrap_or(f64::NAN),
            avg_routes: mean(chunk.iter().map(|r| r.routes as f64)).unwrap_or(f64::NAN),
            avg_cpu: mean(chunk.iter().map(|r| r.cpu_seconds)).unwrap_or(f64::NAN),
            avg_gap: if chunk.iter().all(|r| r.gap.is_some()) {
                mean(chunk.iter().filter_map(|r| r.gap))
            } else {
                None
            },
        });
        start = end;
    }
    out
}

/// Group averages: unweighted means of the per-instance averages.
pub fn group_average(rows: &[&InstanceSummary]) -> (Option<f64>, f64) {
    let gap = if rows.iter().all(|r| r.avg_gap.is_some()) {
        mean(rows.iter().filter_map(|r| r.avg_gap))
    } else {
        None
    };
    (gap, mean(rows.iter().map(|r| r.avg_cpu)).unwrap_or(f64::NAN))
}

pub fn write_table(records: &[RunRecord], mut sink: impl Write) -> Result<()> {
    let summaries = summarize(records);
    let header = [
        "Instance", "Problem", "Mode", "Runs", "Cost", "Best", "Dist.", "|R|", "CPU (s)", "Gap (%)",
    ];
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut start = 0;
    while start < summaries.len() {
        let g = &summaries[start].group;
        let end = start + summaries[start..].iter().take_while(|s| &s.group == g).count();
        for s in &summaries[start..end] {
            rows.push(vec![
                s.instance.clone(),
                s.kind.to_string(),
                s.mode.as_str().to_string(),
                s.runs.to_string(),
                fmt2(s.avg_cost),
                fmt2(s.best_cost),
                fmt2(s.avg_distance),
                fmt2(s.avg_routes),
                fmt2(s.avg_cpu),
                fmt_opt(s.avg_gap),
            ]);
        }
        let group: Vec<&InstanceSummary> = summaries[start..end].iter().collect();
        if group.len() > 1 {
            let (gap, cpu) = group_average(&group);
            let mut row = vec![format!("Avg {g}")];
            row.extend(std::iter::repeat_n(String::new(), 7));
            row.push(fmt2(cpu));
            row.push(fmt_opt(gap));
            rows.push(row);
        }
        start = end;
    }
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>| -> String {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(k, (c, &w))| {
                let pad = w - c.chars().count();
                if k == 0 {
                    format!("{c}{}", " ".repeat(pad))
                } else {
                    format!("{}{c}", " ".repeat(pad))
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(sink, "{}", line(header.iter().map(|h| h.to_string()).collect()))?;
    for row in rows {
        writeln!(sink, "{}", line(row))?;
    }
    Ok(())
}

/// Writes the CSV to `csv_sink` and the aligned table to `table_sink`.
pub fn emit_results(records: &[RunRecord], csv_sink: impl Write, table_sink: impl Write) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Param("no run records to report".into()));
    }
    write_csv(records, csv_sink)?;
    write_table(records, table_sink)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(instance: &str, seed: u64, cost: f64, gap: Option<f64>) -> RunRecord {
        RunRecord {
            instance: instance.into(),
            group: group_of(instance),
            kind: ProblemKind::Fcvrp,
            seed,
            mode: Mode::Dynamic,
            cost,
            distance: cost / 2.0,
            routes: 5,
            cpu_seconds: 0.5,
            gap,
            percent_dist: None,
            feasible: true,
        }
    }

    fn render(records: &[RunRecord]) -> (String, String) {
        let (mut csv, mut table) = (Vec::new(), Vec::new());
        emit_results(records, &mut csv, &mut table).unwrap();
        (String::from_utf8(csv).unwrap(), String::from_utf8(table).unwrap())
    }

    #[test]
    fn tiny_negative_values_print_as_zero() {
        assert_eq!(fmt2(-1e-9), "0.00");
        assert_eq!(fmt2(-0.005001), "-0.01");
    }

    #[test]
    fn groups() {
        assert_eq!(group_of("UK10_03-B"), "UK10-B");
        assert_eq!(group_of("UK200_11"), "UK200");
        assert_eq!(group_of("C12"), "C");
    }

    #[test]
    fn single_record_is_header_plus_row() {
        let (csv, table) = render(&[rec("C1", 0, 760.123, Some(1.2))]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "C1,C,fcvrp,dynamic,0,760.12,380.06,5,0.50,1.20,–,true");
        assert_eq!(table.lines().count(), 2);
    }

    #[test]
    fn missing_gap_is_a_dash() {
        let (csv, table) = render(&[rec("X1", 0, 10.0, None)]);
        assert!(csv.lines().nth(1).unwrap().contains(",–,–,"));
        assert!(table.lines().nth(1).unwrap().trim_end().ends_with('–'));
    }

    #[test]
    fn group_average_is_unweighted_over_instances() {
        let records = vec![
            rec("C1", 0, 1.0, Some(1.0)),
            rec("C1", 1, 1.0, Some(3.0)),
            rec("C1", 2, 1.0, Some(2.0)),
            rec("C2", 0, 1.0, Some(6.0)),
        ];
        let (_, table) = render(&records);
        let avg = table.lines().find(|l| l.starts_with("Avg C")).unwrap();
        // Instance means are 2 and 6.
        assert!(avg.trim_end().ends_with("4.00"), "{avg}");
    }

    #[test]
    fn output_is_stable_under_input_order() {
        let mut records = vec![rec("C10", 1, 3.0, None), rec("C2", 0, 2.0, None), rec("C2", 1, 1.0, None)];
        let a = render(&records);
        records.reverse();
        assert_eq!(a, render(&records));
        assert!(a.0.find("C2,").unwrap() < a.0.find("C10,").unwrap());
    }
}
