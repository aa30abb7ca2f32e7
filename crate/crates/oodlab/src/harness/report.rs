//! Table rendering for result records.

use std::collections::BTreeSet;

use super::config::ExperimentId;
use super::record::{CellRecord, ResultRecord};
use super::HarnessError;

/// Values beyond this render as an overflow marker; the record keeps the
/// exact number.
const RENDER_CAP: f64 = 9999.0;

fn metric_columns(records: &[ResultRecord]) -> Vec<String> {
    let mut keys = BTreeSet::new();
    for record in records {
        for cell in &record.cells {
            keys.extend(cell.metrics.keys().cloned());
        }
    }
    keys.into_iter().collect()
}

fn check_single_id(records: &[ResultRecord]) -> Result<ExperimentId, HarnessError> {
    let first = records
        .first()
        .ok_or(HarnessError::NoRecords)?
        .experiment;
    for record in records {
        if record.experiment != first {
            return Err(HarnessError::MixedExperimentIds {
                first: first.as_str(),
                second: record.experiment.as_str(),
            });
        }
    }
    Ok(first)
}

/// Cells in presentation order: exp11 tables group rows by condition and
/// then feature arm, the rest keep execution order.
fn ordered_cells(record: &ResultRecord) -> Vec<&CellRecord> {
    let mut cells: Vec<&CellRecord> = record.cells.iter().collect();
    if record.experiment == ExperimentId::Exp11 {
        cells.sort_by(|a, b| (&a.condition, &a.arm).cmp(&(&b.condition, &b.arm)));
    }
    cells
}

fn fmt_number(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let a = v.abs();
    if a > RENDER_CAP {
        return if v > 0.0 { "≫9999" } else { "≪-9999" }.to_string();
    }
    if a >= 100.0 {
        format!("{v:.1}")
    } else if a >= 1.0 {
        format!("{v:.3}")
    } else {
        format!("{v:.4}")
    }
}

fn fmt_summary(mean: f64, std: f64, seeds: usize) -> String {
    if mean.is_finite() && mean.abs() > RENDER_CAP {
        return "≫9999".to_string();
    }
    if seeds < 2 {
        fmt_number(mean)
    } else {
        format!("{} ± {}", fmt_number(mean), fmt_number(std))
    }
}

/// Markdown table over records of a single experiment; the minimum mean in
/// every metric column is bolded.
pub fn render_markdown(records: &[ResultRecord]) -> Result<String, HarnessError> {
    let id = check_single_id(records)?;
    let columns = metric_columns(records);
    let multi = records.len() > 1;
    let any_error = records
        .iter()
        .any(|r| r.cells.iter().any(|c| c.error.is_some()));

    let mut best = vec![f64::INFINITY; columns.len()];
    for record in records {
        for cell in &record.cells {
            if cell.error.is_some() {
                continue;
            }
            for (j, key) in columns.iter().enumerate() {
                if let Some(summary) = cell.metric(key) {
                    if summary.mean < best[j] {
                        best[j] = summary.mean;
                    }
                }
            }
        }
    }

    let mut out = String::new();
    out.push_str(&format!("## {id}\n\n"));
    let mut header = vec![];
    if multi {
        header.push("run".to_string());
    }
    header.push("cell".to_string());
    header.extend(columns.iter().cloned());
    if any_error {
        header.push("error".to_string());
    }
    out.push_str(&format!("| {} |\n", header.join(" | ")));
    out.push_str(&format!("|{}\n", " --- |".repeat(header.len())));

    for (idx, record) in records.iter().enumerate() {
        for cell in ordered_cells(record) {
            let mut row = vec![];
            if multi {
                row.push(idx.to_string());
            }
            row.push(cell.cell.clone());
            for (j, key) in columns.iter().enumerate() {
                match cell.metric(key) {
                    Some(s) => {
                        let text = fmt_summary(s.mean, s.std, s.per_seed.len());
                        if cell.error.is_none() && s.mean == best[j] {
                            row.push(format!("**{text}**"));
                        } else {
                            row.push(text);
                        }
                    }
                    None => row.push(String::new()),
                }
            }
            if any_error {
                row.push(cell.error.clone().unwrap_or_default());
            }
            out.push_str(&format!("| {} |\n", row.join(" | ")));
        }
    }
    Ok(out)
}

/// CSV table over records of a single experiment. Numbers are written in
/// full precision; overflow capping is a markdown-only convention.
pub fn render_csv(records: &[ResultRecord]) -> Result<String, HarnessError> {
    check_single_id(records)?;
    let columns = metric_columns(records);
    let mut writer = csv::Writer::from_writer(vec![]);

    let mut header = vec![
        "experiment".to_string(),
        "cell".to_string(),
        "condition".to_string(),
        "arm".to_string(),
    ];
    for key in &columns {
        header.push(format!("{key}_mean"));
        header.push(format!("{key}_std"));
    }
    header.push("error".to_string());
    writer.write_record(&header).expect("vec sink");

    for record in records {
        for cell in ordered_cells(record) {
            let mut row = vec![
                record.experiment.as_str().to_string(),
                cell.cell.clone(),
                cell.condition.clone(),
                cell.arm.clone(),
            ];
            for key in &columns {
                match cell.metric(key) {
                    Some(s) => {
                        row.push(format!("{}", s.mean));
                        row.push(format!("{}", s.std));
                    }
                    None => {
                        row.push(String::new());
                        row.push(String::new());
                    }
                }
            }
            row.push(cell.error.clone().unwrap_or_default());
            writer.write_record(&row).expect("vec sink");
        }
    }
    let bytes = writer.into_inner().expect("vec sink");
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentConfig;
    use crate::harness::record::CellRecord;

    fn record_with(id: ExperimentId, cells: Vec<CellRecord>) -> ResultRecord {
        ResultRecord::new(ExperimentConfig::new(id), cells, 0)
    }

    #[test]
    fn single_record_renders_single_row() {
        let mut cell = CellRecord::new("sin", "fourier/ols");
        cell.push_metric("ood_pct", vec![0.1, 0.3]);
        let record = record_with(ExperimentId::Exp12, vec![cell]);
        let md = render_markdown(std::slice::from_ref(&record)).unwrap();
        let rows: Vec<&str> = md.lines().filter(|l| l.starts_with('|')).collect();
        assert_eq!(rows.len(), 3, "header, separator, one data row:\n{md}");
        assert!(md.contains("0.2000 ± 0.1414"), "{md}");
    }

    #[test]
    fn overflow_values_render_capped() {
        let mut cell = CellRecord::new("p1", "logy/ols");
        cell.push_metric("ood_pct", vec![12345.0]);
        let record = record_with(ExperimentId::Exp12, vec![cell]);
        let md = render_markdown(std::slice::from_ref(&record)).unwrap();
        assert!(md.contains("≫9999"), "{md}");
        assert!(!md.contains("12345"), "{md}");
        let csv = render_csv(std::slice::from_ref(&record)).unwrap();
        assert!(csv.contains("12345"), "csv keeps exact values:\n{csv}");
    }

    #[test]
    fn minimum_mean_per_column_is_bolded() {
        let mut a = CellRecord::new("sin", "raw/ols");
        a.push_metric("ood_pct", vec![50.0]);
        let mut b = CellRecord::new("sin", "fourier/ols");
        b.push_metric("ood_pct", vec![2.0]);
        let record = record_with(ExperimentId::Exp12, vec![a, b]);
        let md = render_markdown(std::slice::from_ref(&record)).unwrap();
        assert!(md.contains("**2.000**"), "{md}");
        assert!(!md.contains("**50.00"), "{md}");
    }

    #[test]
    fn exp11_rows_sort_by_condition_then_arm() {
        let cells = vec![
            CellRecord::new("sin", "raw/ols"),
            CellRecord::new("sin", "fourier/mlp"),
            CellRecord::new("sin", "fourier/ols"),
        ];
        let record = record_with(ExperimentId::Exp11, cells);
        let md = render_markdown(std::slice::from_ref(&record)).unwrap();
        let fm = md.find("sin/fourier/mlp").unwrap();
        let fo = md.find("sin/fourier/ols").unwrap();
        let ro = md.find("sin/raw/ols").unwrap();
        assert!(fm < fo && fo < ro, "{md}");
    }

    #[test]
    fn mixed_ids_are_rejected() {
        let a = record_with(ExperimentId::Exp11, vec![]);
        let b = record_with(ExperimentId::Exp12, vec![]);
        let err = render_markdown(&[a, b]).unwrap_err();
        assert!(matches!(err, HarnessError::MixedExperimentIds { .. }));
    }

    #[test]
    fn failed_cells_render_their_error() {
        let cells = vec![CellRecord::failed("sin", "raw/mlp", "boom".to_string())];
        let record = record_with(ExperimentId::Exp12, cells);
        let md = render_markdown(std::slice::from_ref(&record)).unwrap();
        assert!(md.contains("boom"), "{md}");
    }
}
