//! Report aggregation for the `oddball` command-line tool.
//!
//! Takes any number of evaluation reports and renders a methods-by-datasets
//! accuracy table, one row per classifier and one column per dataset label.
//! Cells show the mean subtrial accuracy in percent; when component
//! selection was active, the mean number of chosen components follows in
//! braces, e.g. `55.0(2)`. A cell whose run produced no accuracy at all
//! (every repetition failed, as QDA does on raw wide data) renders as `-`.

use oddball::evaluation::EvalReport;

/// Row/column layout shared by the text and CSV renderers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportTable {
    /// Dataset/config labels, in first-appearance order.
    pub columns: Vec<String>,
    /// `(classifier, cells)` rows; cells align with `columns`.
    pub rows: Vec<(String, Vec<String>)>,
}

/// Percentage with two decimals, one trailing zero trimmed: 55 -> "55.0",
/// 0.4733 -> "47.33".
fn format_pct(fraction: f64) -> String {
    let mut s = format!("{:.2}", fraction * 100.0);
    if s.ends_with('0') {
        s.pop();
    }
    s
}

/// One table cell from a report's aggregates.
pub fn format_cell(mean_accuracy: Option<f64>, mean_chosen_count: Option<f64>) -> String {
    match mean_accuracy {
        None => "-".to_string(),
        Some(acc) => match mean_chosen_count {
            Some(count) => format!("{}({})", format_pct(acc), count.round() as i64),
            None => format_pct(acc),
        },
    }
}

const CLASSIFIER_ORDER: [&str; 4] = ["LDA", "QDA", "LR", "NLR"];

/// Builds the methods-by-datasets table. Later reports overwrite earlier
/// ones that share a (classifier, label) cell.
pub fn build_table(reports: &[EvalReport]) -> ReportTable {
    let mut columns: Vec<String> = Vec::new();
    for r in reports {
        if !columns.contains(&r.config.label) {
            columns.push(r.config.label.clone());
        }
    }
    let mut cells: std::collections::HashMap<(String, String), String> =
        std::collections::HashMap::new();
    let mut present: Vec<String> = Vec::new();
    for r in reports {
        let classifier = r.config.classifier.kind.to_string();
        if !present.contains(&classifier) {
            present.push(classifier.clone());
        }
        cells.insert(
            (classifier, r.config.label.clone()),
            format_cell(r.mean_accuracy, r.mean_chosen_count),
        );
    }
    let mut ordered: Vec<String> = CLASSIFIER_ORDER
        .iter()
        .map(|s| s.to_string())
        .filter(|c| present.contains(c))
        .collect();
    for c in present {
        if !ordered.contains(&c) {
            ordered.push(c);
        }
    }
    let rows = ordered
        .into_iter()
        .map(|classifier| {
            let row = columns
                .iter()
                .map(|label| {
                    cells
                        .get(&(classifier.clone(), label.clone()))
                        .cloned()
                        .unwrap_or_else(|| "-".to_string())
                })
                .collect();
            (classifier, row)
        })
        .collect();
    ReportTable { columns, rows }
}

/// Aligned plain-text rendering.
pub fn render_text(table: &ReportTable) -> String {
    let mut widths = vec!["Classifier".len()];
    widths.extend(table.columns.iter().map(|c| c.len()));
    for (name, cells) in &table.rows {
        widths[0] = widths[0].max(name.len());
        for (i, cell) in cells.iter().enumerate() {
            widths[i + 1] = widths[i + 1].max(cell.len());
        }
    }
    let mut out = String::new();
    let mut header = vec![format!("{:<w$}", "Classifier", w = widths[0])];
    for (i, c) in table.columns.iter().enumerate() {
        header.push(format!("{:>w$}", c, w = widths[i + 1]));
    }
    out.push_str(&header.join("  "));
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1)));
    out.push('\n');
    for (name, cells) in &table.rows {
        let mut line = vec![format!("{:<w$}", name, w = widths[0])];
        for (i, cell) in cells.iter().enumerate() {
            line.push(format!("{:>w$}", cell, w = widths[i + 1]));
        }
        out.push_str(&line.join("  "));
        out.push('\n');
    }
    out
}

/// CSV rendering with the same layout.
pub fn render_csv(table: &ReportTable) -> String {
    let mut out = String::from("classifier");
    for c in &table.columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (name, cells) in &table.rows {
        out.push_str(name);
        for cell in cells {
            out.push(',');
            out.push_str(cell);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use oddball::classifier::{ClassifierKind, ClassifierSpec};
    use oddball::evaluation::{EvalReport, FeatureMode, PipelineConfig};

    fn report(
        label: &str,
        kind: ClassifierKind,
        mean: Option<f64>,
        chosen: Option<f64>,
    ) -> EvalReport {
        let cfg = PipelineConfig::new(label, FeatureMode::Raw, ClassifierSpec::new(kind));
        EvalReport {
            config: cfg,
            repetitions: vec![],
            mean_accuracy: mean,
            mean_channel_accuracy: None,
            mean_chosen_count: chosen,
            error_counts: Default::default(),
        }
    }

    #[test]
    fn single_report_is_a_1x1_table() {
        let t = build_table(&[report("sub1", ClassifierKind::Lda, Some(0.4733), None)]);
        assert_eq!(t.columns, vec!["sub1"]);
        assert_eq!(t.rows, vec![("LDA".to_string(), vec!["47.33".to_string()])]);
    }

    #[test]
    fn failed_run_renders_a_dash() {
        let t = build_table(&[
            report("sub1", ClassifierKind::Lda, Some(0.5), None),
            report("sub1", ClassifierKind::Qda, None, None),
            report("sub1", ClassifierKind::Lr, Some(0.6562), None),
            report("sub1", ClassifierKind::Nlr, Some(0.5875), None),
        ]);
        assert_eq!(t.rows[1], ("QDA".to_string(), vec!["-".to_string()]));
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.rows[0].0, "LDA");
        assert_eq!(t.rows[2], ("LR".to_string(), vec!["65.62".to_string()]));
    }

    #[test]
    fn selection_cell_carries_braces() {
        let t = build_table(&[report("sub1", ClassifierKind::Lda, Some(0.55), Some(2.0))]);
        assert_eq!(t.rows[0].1[0], "55.0(2)");
        let t = build_table(&[report("sub1", ClassifierKind::Nlr, Some(0.6305), Some(4.4))]);
        assert_eq!(t.rows[0].1[0], "63.05(4)");
    }

    #[test]
    fn text_rendering_is_aligned() {
        let t = build_table(&[
            report("sub1", ClassifierKind::Lda, Some(0.55), Some(2.0)),
            report("sub2", ClassifierKind::Lda, Some(0.48), Some(3.0)),
            report("sub1", ClassifierKind::Qda, None, None),
        ]);
        let text = render_text(&t);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].contains("sub1") && lines[0].contains("sub2"));
        assert!(lines[2].starts_with("LDA"));
        assert!(lines[3].starts_with("QDA"));
        assert!(lines[3].contains('-'));

        let csv = render_csv(&t);
        assert!(csv.starts_with("classifier,sub1,sub2\n"));
        assert!(csv.contains("LDA,55.0(2),48.0(3)"));
        assert!(csv.contains("QDA,-,-"));
    }
}
