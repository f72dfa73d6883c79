use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::MetricsReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Table,
    Json,
}

/// Renders a report. Table cells read `P/R/F1` to three decimals.
pub fn emit_report(report: &MetricsReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        ReportFormat::Table => {
            let mut out = String::new();
            let header: Vec<String> = report.k.keys().map(|k| format!("@{k}")).collect();
            let cells: Vec<String> = report
                .k
                .values()
                .map(|m| format!("{:.3}/{:.3}/{:.3}", m.p, m.r, m.f1))
                .collect();
            let width = cells.iter().map(String::len).max().unwrap_or(0);
            let _ = writeln!(out, "{:<8} {}", "", pad(&header, width));
            let _ = writeln!(out, "{:<8} {}", "P/R/F1", pad(&cells, width));
            let c = &report.counts;
            let _ = writeln!(
                out,
                "sentences: {} total, {} extractive, {} without gold, {} evaluated",
                c.total_sentences, c.filtered_extractive, c.filtered_empty_gold, c.evaluated
            );
            if report.is_vacuous() {
                let _ = writeln!(out, "warning: no sentences were evaluated; metrics are zero");
            }
            out
        }
    }
}

fn pad(items: &[String], width: usize) -> String {
    items
        .iter()
        .map(|s| format!("{s:<width$}"))
        .collect::<Vec<_>>()
        .join("  ")
        .trim_end()
        .to_string()
}
