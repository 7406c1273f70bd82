use std::path::{Path, PathBuf};

use crate::fsutil::write_all_atomic;

use super::agency::GroupSummary;
use super::audit::AuditReport;
use super::MetricsError;

pub const REPORT_FILES: [&str; 4] = ["report.json", "tables.csv", "kde.csv", "bars.csv"];

const OVERALL: &str = "all";

/// Pretty JSON with lexicographically sorted keys and shortest round-trip
/// float formatting. Ends with a newline.
pub fn report_json(report: &AuditReport) -> Result<String, MetricsError> {
    // Going through `Value` sorts every object's keys.
    let value = serde_json::to_value(report)?;
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

fn two_decimals(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn values_label(g: &GroupSummary) -> String {
    g.key.pairs().iter().map(|(_, v)| v.as_str()).collect::<Vec<_>>().join(" ")
}

fn stratum_label(stratum: &str) -> String {
    stratum.split(',').map(|kv| kv.split_once('=').map_or(kv, |(_, v)| v)).collect::<Vec<_>>().join(" ")
}

fn rows(report: &AuditReport) -> impl Iterator<Item = (String, &GroupSummary)> {
    let overall = report.groups.iter().map(|g| (OVERALL.to_string(), g));
    let strata = report.strata.iter().flat_map(|(s, gs)| gs.iter().map(move |g| (stratum_label(s), g)));
    overall.chain(strata)
}

fn csv_string(header: &[&str], records: impl Iterator<Item = Vec<String>>) -> Result<String, MetricsError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| MetricsError::Io(e.into());
    w.write_record(header).map_err(io)?;
    for r in records {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| MetricsError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Group averages rounded to two decimals, one row per group and stratum.
pub fn tables_csv(report: &AuditReport) -> Result<String, MetricsError> {
    csv_string(
        &["Dataset/Group", "Gender/Race", "Avg%Agen", "Avg%Comm", "AvgGap"],
        rows(report).map(|(stratum, g)| {
            vec![
                stratum,
                values_label(g),
                two_decimals(g.avg_pct_agentic),
                two_decimals(g.avg_pct_communal),
                two_decimals(g.avg_gap),
            ]
        }),
    )
}

pub fn kde_csv(report: &AuditReport) -> Result<String, MetricsError> {
    csv_string(
        &["group", "grid", "density"],
        report
            .kde
            .iter()
            .flat_map(|(g, s)| s.grid.iter().zip(&s.density).map(move |(x, d)| vec![g.clone(), x.to_string(), d.to_string()])),
    )
}

pub fn bars_csv(report: &AuditReport) -> Result<String, MetricsError> {
    csv_string(
        &["stratum", "group", "avg_gap"],
        rows(report).map(|(stratum, g)| vec![stratum, g.group.clone(), g.avg_gap.to_string()]),
    )
}

/// Renders all four report files and writes them into `dir`. Nothing is
/// left behind if any of them fails.
pub fn write_report_dir(report: &AuditReport, dir: &Path) -> Result<Vec<PathBuf>, MetricsError> {
    let files = [
        (REPORT_FILES[0], report_json(report)?.into_bytes()),
        (REPORT_FILES[1], tables_csv(report)?.into_bytes()),
        (REPORT_FILES[2], kde_csv(report)?.into_bytes()),
        (REPORT_FILES[3], bars_csv(report)?.into_bytes()),
    ];
    Ok(write_all_atomic(dir, &files)?)
}
