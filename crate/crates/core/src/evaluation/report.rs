use super::ner::NerReport;
use super::prf::{round2, MacroAvg, Prf};
use serde_json::json;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Json,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "markdown-table" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format {other:?} (tsv, json, markdown)")),
        }
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}", round2(x))
}

fn json_pct(x: f64) -> serde_json::Value {
    json!(round2(x))
}

/// Renders labelled PRF rows with an optional macro row last. Percentages
/// are rounded to two decimals here and nowhere else.
pub fn emit_prf_table(rows: &[(String, Prf)], macro_avg: Option<&MacroAvg>, format: ReportFormat) -> Vec<u8> {
    let text = match format {
        ReportFormat::Tsv => {
            let mut out = String::from("label\tprecision\trecall\tf1\ttp\tfp\tfn\n");
            for (label, p) in rows {
                out.push_str(&format!(
                    "{label}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    pct(p.precision),
                    pct(p.recall),
                    pct(p.f1),
                    p.counts.tp,
                    p.counts.fp,
                    p.counts.fn_
                ));
            }
            if let Some(m) = macro_avg {
                out.push_str(&format!(
                    "macro_avg\t{}\t{}\t{}\t-\t-\t-\n",
                    pct(m.precision),
                    pct(m.recall),
                    pct(m.f1)
                ));
            }
            out
        }
        ReportFormat::Markdown => {
            let mut out = String::from("| Label | P | R | F1 |\n|---|---:|---:|---:|\n");
            for (label, p) in rows {
                out.push_str(&format!(
                    "| {label} | {} | {} | {} |\n",
                    pct(p.precision),
                    pct(p.recall),
                    pct(p.f1)
                ));
            }
            match macro_avg {
                Some(m) => out.push_str(&format!(
                    "| macro_avg | {} | {} | {} |\n",
                    pct(m.precision),
                    pct(m.recall),
                    pct(m.f1)
                )),
                None => out.push_str("| macro_avg | - | - | - |\n"),
            }
            out
        }
        ReportFormat::Json => {
            let per_class: serde_json::Map<String, serde_json::Value> = rows
                .iter()
                .map(|(label, p)| {
                    (
                        label.clone(),
                        json!({
                            "precision": json_pct(p.precision),
                            "recall": json_pct(p.recall),
                            "f1": json_pct(p.f1),
                            "tp": p.counts.tp,
                            "fp": p.counts.fp,
                            "fn": p.counts.fn_,
                        }),
                    )
                })
                .collect();
            let macro_value = macro_avg.map(|m| {
                json!({
                    "precision": json_pct(m.precision),
                    "recall": json_pct(m.recall),
                    "f1": json_pct(m.f1),
                })
            });
            let mut s = serde_json::to_string_pretty(&json!({
                "per_class": per_class,
                "macro_avg": macro_value,
            }))
            .expect("report serializes");
            s.push('\n');
            s
        }
    };
    text.into_bytes()
}

pub fn emit_report(report: &NerReport, format: ReportFormat) -> Vec<u8> {
    let rows: Vec<(String, Prf)> = report.per_class.iter().map(|(l, p)| (l.clone(), *p)).collect();
    emit_prf_table(&rows, report.macro_avg.as_ref(), format)
}
