//! CSV writers for metrics, method comparisons and sensitivity reports.

use lv_core::decoder::{Cell, Variant};
use lv_core::diagnostics::{Condition, Hypothesis, SensitivityReport};
use lv_core::eval::{CrossValidation, Metrics};

use crate::error::{LvError, Result};

pub const METRICS_HEADER: [&str; 9] =
    ["fold", "variant", "accuracy", "f1", "acc_known", "acc_unknown", "n_known", "n_unknown", "f1_weighted"];
pub const COMPARISON_HEADER: [&str; 5] = ["variant", "known", "unknown", "overall", "f1"];
pub const SENSITIVITY_HEADER: [&str; 8] =
    ["condition", "variant", "hypothesis", "score", "parasite_count", "row", "col", "hypothesis_parasites"];
pub const SENSITIVITY_NOTE: &str = "# parasite_count counts every parasite term occurrence across the reported cells";

fn ratio(x: f64) -> String {
    format!("{x:.6}")
}

fn opt(x: Option<f64>) -> String {
    x.map(ratio).unwrap_or_default()
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string())).map_err(csv::Error::from)?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn metrics_row(fold: &str, variant: Variant, m: &Metrics) -> Vec<String> {
    vec![
        fold.to_string(),
        variant.name().to_string(),
        ratio(m.accuracy),
        ratio(m.f1),
        opt(m.accuracy_known),
        opt(m.accuracy_unknown),
        m.n_known.to_string(),
        m.n_unknown.to_string(),
        ratio(m.f1_weighted),
    ]
}

/// A single evaluation as fold 0.
pub fn metrics_csv(rows: &[(Variant, Metrics)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_HEADER)?;
    for (v, m) in rows {
        w.write_record(metrics_row("0", *v, m))?;
    }
    finish(w)
}

/// Ten fold rows then an `Avg` row, per variant.
pub fn xval_csv(cv: &CrossValidation) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_HEADER)?;
    for (i, avg) in cv.averages.iter().enumerate() {
        for fold in &cv.folds {
            let (v, m) = &fold.metrics[i];
            w.write_record(metrics_row(&fold.fold.to_string(), *v, m))?;
        }
        let n = cv.folds.len().max(1) as f64;
        let mean_count = |f: fn(&Metrics) -> u64| {
            let s: u64 = cv.folds.iter().map(|fold| f(&fold.metrics[i].1)).sum();
            format!("{:.1}", s as f64 / n)
        };
        w.write_record([
            "Avg".to_string(),
            avg.variant.name().to_string(),
            ratio(avg.accuracy),
            ratio(avg.f1),
            opt(avg.accuracy_known),
            opt(avg.accuracy_unknown),
            mean_count(|m| m.n_known),
            mean_count(|m| m.n_unknown),
            ratio(avg.f1_weighted),
        ])?;
    }
    finish(w)
}

pub fn comparison_csv(rows: &[(Variant, Metrics)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COMPARISON_HEADER)?;
    for (v, m) in rows {
        w.write_record([
            v.name().to_string(),
            opt(m.accuracy_known),
            opt(m.accuracy_unknown),
            ratio(m.accuracy),
            ratio(m.f1),
        ])?;
    }
    finish(w)
}

fn letter(i: usize) -> String {
    const NAMES: [&str; 3] = ["X", "Y", "Z"];
    NAMES.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("H{}", i + 1))
}

pub fn sensitivity_csv(reports: &[SensitivityReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SENSITIVITY_HEADER)?;
    for r in reports {
        for (i, h) in r.hypotheses.iter().enumerate() {
            w.write_record([
                r.condition.name().to_string(),
                r.variant.name().to_string(),
                letter(i),
                h.score.to_string(),
                r.parasite_count.to_string(),
                h.cell.row.to_string(),
                h.cell.col.to_string(),
                h.parasites.to_string(),
            ])?;
        }
    }
    Ok(format!("{SENSITIVITY_NOTE}\n{}", finish(w)?))
}

/// Reads back [`sensitivity_csv`] output. The audited position is not
/// stored in the file and is supplied by the caller.
pub fn parse_sensitivity_csv(text: &str, position: usize) -> Result<Vec<SensitivityReport>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let mut out: Vec<SensitivityReport> = Vec::new();
    let field_err = |what: &str| LvError::Usage(format!("sensitivity csv: invalid {what}"));
    for rec in r.records() {
        let rec = rec?;
        let get = |i: usize| rec.get(i).ok_or_else(|| field_err(SENSITIVITY_HEADER[i]));
        let condition: Condition = get(0)?.parse()?;
        let variant: Variant = get(1)?.parse()?;
        let score: f64 = get(3)?.parse().map_err(|_| field_err("score"))?;
        let total: usize = get(4)?.parse().map_err(|_| field_err("parasite_count"))?;
        let row: usize = get(5)?.parse().map_err(|_| field_err("row"))?;
        let col: usize = get(6)?.parse().map_err(|_| field_err("col"))?;
        let parasites: usize = get(7)?.parse().map_err(|_| field_err("hypothesis_parasites"))?;
        let hyp = Hypothesis { cell: Cell { position, row, col }, score, parasites };
        match out.last_mut() {
            Some(last) if last.condition == condition && last.variant == variant && get(2)? != "X" => {
                last.hypotheses.push(hyp)
            }
            _ => out.push(SensitivityReport { condition, variant, hypotheses: vec![hyp], parasite_count: total }),
        }
    }
    Ok(out)
}
