//! Report emission: append-only CSV plus a JSON sidecar carrying the
//! campaign configuration, and conversion between the two.

use anyhow::{anyhow, Result};
use qtest_core::mutator::MutKind;
use qtest_core::stateprep::InputKind;

use crate::config::ExperimentConfig;
use crate::experiment::{ReportRow, TriggerReport};

pub const CSV_HEADER: &str = "benchmark,n,kind,input,mutants,trials,triggers,rate";

pub fn render_csv(report: &TriggerReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.6}\n",
            r.benchmark,
            r.n,
            r.kind.name(),
            r.input.name(),
            r.mutants,
            r.trials,
            r.triggers,
            r.rate()
        ));
    }
    out
}

pub fn render_json(report: &TriggerReport, cfg: Option<&ExperimentConfig>) -> String {
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "{{\"benchmark\":\"{}\",\"n\":{},\"kind\":\"{}\",\"input\":\"{}\",\"mutants\":{},\"trials\":{},\"triggers\":{},\"rate\":{:.6}}}",
                r.benchmark,
                r.n,
                r.kind.name(),
                r.input.name(),
                r.mutants,
                r.trials,
                r.triggers,
                r.rate()
            )
        })
        .collect();
    let config = cfg.map(|c| c.to_json()).unwrap_or_else(|| "null".into());
    format!("{{\"config\":{config},\"rows\":[{}]}}\n", rows.join(","))
}

/// Parse a CSV report back into rows (rates are recomputed).
pub fn parse_csv(src: &str) -> Result<TriggerReport> {
    let mut lines = src.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(anyhow!(
                "not a trigger report: header {:?}",
                other.unwrap_or("")
            ))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(anyhow!("line {}: expected 8 fields", idx + 2));
        }
        rows.push(ReportRow {
            benchmark: f[0].to_string(),
            n: f[1].parse()?,
            kind: MutKind::from_name(f[2]).ok_or_else(|| anyhow!("bad kind {}", f[2]))?,
            input: InputKind::from_name(f[3]).ok_or_else(|| anyhow!("bad input {}", f[3]))?,
            mutants: f[4].parse()?,
            trials: f[5].parse()?,
            triggers: f[6].parse()?,
        });
    }
    Ok(TriggerReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TriggerReport {
        TriggerReport {
            rows: vec![ReportRow {
                benchmark: "QFT".into(),
                n: 6,
                kind: MutKind::Gm,
                input: InputKind::Ci,
                mutants: 10,
                trials: 6000,
                triggers: 4800,
            }],
        }
    }

    #[test]
    fn csv_round_trips() {
        let report = sample();
        let csv = render_csv(&report);
        assert!(csv.starts_with(CSV_HEADER));
        assert!(csv.contains("QFT,6,GM,CI,10,6000,4800,0.800000"));
        let parsed = parse_csv(&csv).unwrap();
        assert_eq!(parsed, report);
    }

    #[test]
    fn json_has_rows_and_config_slot() {
        let json = render_json(&sample(), None);
        assert!(json.contains("\"config\":null"));
        assert!(json.contains("\"benchmark\":\"QFT\""));
    }
}
