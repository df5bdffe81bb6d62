//! Confusion-matrix rendering: an aligned text table (rows true, columns
//! predicted, per-class accuracy row, trailing mean) plus a
//! machine-readable CSV form.

use std::fmt::Write as _;

use camid_core::eval::{accuracies, AccuracyReport, ConfusionMatrix};

use crate::error::Result;

/// Text table in the usual confusion-matrix layout.
pub fn render_text(cm: &ConfusionMatrix) -> Result<String> {
    let acc = accuracies(cm)?;
    let k = cm.k();
    let names: Vec<String> = (0..k).map(|i| class_name(cm, i)).collect();
    let width = names
        .iter()
        .map(|n| n.len())
        .chain(std::iter::once(5))
        .max()
        .unwrap()
        .max(cm.total().to_string().len())
        + 2;

    let mut out = String::new();
    write!(out, "{:>width$}", "").unwrap();
    for n in &names {
        write!(out, "{n:>width$}").unwrap();
    }
    writeln!(out, "{:>width$}", "%").unwrap();
    for (t, name) in names.iter().enumerate() {
        write!(out, "{name:>width$}").unwrap();
        for p in 0..k {
            write!(out, "{:>width$}", cm.count(t, p)).unwrap();
        }
        writeln!(out, "{:>width$.1}", 100.0 * acc.per_class[t]).unwrap();
    }
    write!(out, "{:>width$}", "%").unwrap();
    for t in 0..k {
        write!(out, "{:>width$.0}", 100.0 * acc.per_class[t]).unwrap();
    }
    writeln!(out, "{:>width$.1}", 100.0 * acc.mean_per_class).unwrap();
    writeln!(
        out,
        "mean per-class accuracy {:.2}%  overall accuracy {:.2}%  ({} samples)",
        100.0 * acc.mean_per_class,
        100.0 * acc.overall,
        cm.total()
    )
    .unwrap();
    Ok(out)
}

/// CSV with one row per true class: counts, then per-class accuracy; a
/// final `mean` row carries the summary numbers.
pub fn render_csv(cm: &ConfusionMatrix) -> Result<String> {
    let acc = accuracies(cm)?;
    let k = cm.k();
    let mut out = String::from("true_class");
    for p in 0..k {
        write!(out, ",pred_{}", class_name(cm, p)).unwrap();
    }
    out.push_str(",accuracy\n");
    for t in 0..k {
        write!(out, "{}", class_name(cm, t)).unwrap();
        for p in 0..k {
            write!(out, ",{}", cm.count(t, p)).unwrap();
        }
        writeln!(out, ",{}", acc.per_class[t]).unwrap();
    }
    write!(out, "mean").unwrap();
    for _ in 0..k {
        out.push(',');
    }
    writeln!(out, "{}", acc.mean_per_class).unwrap();
    Ok(out)
}

/// Accuracy summary reused by train/eval output.
pub fn summary_line(acc: &AccuracyReport) -> String {
    format!(
        "mean per-class accuracy {:.4}, overall accuracy {:.4}",
        acc.mean_per_class, acc.overall
    )
}

fn class_name(cm: &ConfusionMatrix, i: usize) -> String {
    cm.class_names
        .get(i)
        .cloned()
        .unwrap_or_else(|| format!("class{i}"))
}
