//! Deterministic report rendering: markdown tables for reading, TSV
//! rows for spreadsheets, and a structured JSON document that carries
//! every value at full precision and parses back losslessly.
//!
//! Markdown shows BLEU to one decimal and accuracy as percentages to
//! one decimal; TSV and JSON keep accuracy as fractions in [0,1].
//! Splits with no records render as `–`.

use serde::{Deserialize, Serialize};

use super::{CategorySplit, EvalError, EvalReport, FormSplit, MetricTriplet, ReportCell};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Tsv,
    Structured,
}

const ABSENT: &str = "–";

fn category_heading(category: CategorySplit) -> &'static str {
    match category {
        CategorySplit::Overall => "Overall",
        CategorySplit::Cat1 => "Category 1",
        CategorySplit::Cat2 => "Category 2",
    }
}

fn form_label(form: FormSplit) -> &'static str {
    match form {
        FormSplit::All => "All",
        FormSplit::Feminine => "Feminine",
        FormSplit::Masculine => "Masculine",
    }
}

fn md_triplet(t: Option<MetricTriplet>, scale: f64) -> [String; 3] {
    match t {
        Some(t) => [
            format!("{:.1}", t.correct * scale),
            format!("{:.1}", t.wrong * scale),
            format!("{:.1}", t.diff * scale),
        ],
        None => [ABSENT.into(), ABSENT.into(), ABSENT.into()],
    }
}

fn render_markdown(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str("# Dual-reference evaluation\n\n");
    out.push_str(&format!("- corpus: {}\n", report.corpus_id));
    out.push_str(&format!("- hypotheses: {}\n", report.hypotheses_id));

    for (title, pick, scale) in [
        ("BLEU", (|c: &ReportCell| c.bleu) as fn(&ReportCell) -> MetricTriplet, 1.0),
        ("Accuracy (%)", |c: &ReportCell| c.accuracy, 100.0),
    ] {
        out.push_str(&format!("\n## {title}\n"));
        for category in CategorySplit::ALL {
            out.push_str(&format!("\n### {}\n\n", category_heading(category)));
            out.push_str("| | Correct | Wrong | Diff |\n");
            out.push_str("|---|---:|---:|---:|\n");
            for form in FormSplit::ALL {
                let cols = md_triplet(report.cell(form, category).map(&pick), scale);
                out.push_str(&format!(
                    "| {} | {} | {} | {} |\n",
                    form_label(form),
                    cols[0],
                    cols[1],
                    cols[2]
                ));
            }
        }
    }

    out.push_str("\n## Coverage\n\n");
    out.push_str("| | Overall | Category 1 | Category 2 |\n");
    out.push_str("|---|---:|---:|---:|\n");
    for form in FormSplit::ALL {
        let mut cols = Vec::new();
        for category in CategorySplit::ALL {
            cols.push(match report.cell(form, category) {
                Some(cell) => format!("{} records, {} terms", cell.n_records, cell.n_terms),
                None => ABSENT.into(),
            });
        }
        out.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            form_label(form),
            cols[0],
            cols[1],
            cols[2]
        ));
    }
    out
}

fn render_tsv(report: &EvalReport) -> String {
    let mut out = String::from("SPLIT\tMETRIC\tCORRECT\tWRONG\tDIFF\tN-RECORDS\tN-TERMS\n");
    for category in CategorySplit::ALL {
        for form in FormSplit::ALL {
            let split = format!("{}/{}", form.name(), category.name());
            let cell = report.cell(form, category);
            for (metric, triplet) in [
                ("bleu", cell.map(|c| c.bleu)),
                ("accuracy", cell.map(|c| c.accuracy)),
            ] {
                let values = match triplet {
                    Some(t) => [t.correct.to_string(), t.wrong.to_string(), t.diff.to_string()],
                    None => [ABSENT.into(), ABSENT.into(), ABSENT.into()],
                };
                out.push_str(&format!(
                    "{split}\t{metric}\t{}\t{}\t{}\t{}\t{}\n",
                    values[0],
                    values[1],
                    values[2],
                    cell.map_or(0, |c| c.n_records),
                    cell.map_or(0, |c| c.n_terms),
                ));
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct StructuredReport {
    corpus: String,
    hypotheses: String,
    cells: Vec<StructuredCell>,
}

#[derive(Serialize, Deserialize)]
struct StructuredCell {
    form: String,
    category: String,
    n_records: usize,
    n_terms: usize,
    bleu: Option<MetricTriplet>,
    accuracy: Option<MetricTriplet>,
}

fn render_structured(report: &EvalReport) -> String {
    let mut cells = Vec::new();
    for form in FormSplit::ALL {
        for category in CategorySplit::ALL {
            let cell = report.cell(form, category);
            cells.push(StructuredCell {
                form: form.name().into(),
                category: category.name().into(),
                n_records: cell.map_or(0, |c| c.n_records),
                n_terms: cell.map_or(0, |c| c.n_terms),
                bleu: cell.map(|c| c.bleu),
                accuracy: cell.map(|c| c.accuracy),
            });
        }
    }
    let doc = StructuredReport {
        corpus: report.corpus_id.clone(),
        hypotheses: report.hypotheses_id.clone(),
        cells,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

/// Render a complete report. Output is byte-deterministic for a given
/// report and format.
pub fn render_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => render_markdown(report),
        ReportFormat::Tsv => render_tsv(report),
        ReportFormat::Structured => render_structured(report),
    }
}

/// Parse a structured rendering back into a report.
pub fn parse_structured_report(text: &str) -> Result<EvalReport, EvalError> {
    let doc: StructuredReport =
        serde_json::from_str(text).map_err(|e| EvalError::BadStructured(e.to_string()))?;
    let mut cells = vec![None; FormSplit::ALL.len() * CategorySplit::ALL.len()];
    for cell in doc.cells {
        let form = FormSplit::ALL
            .into_iter()
            .find(|f| f.name() == cell.form)
            .ok_or_else(|| EvalError::BadStructured(format!("unknown form '{}'", cell.form)))?;
        let category = CategorySplit::ALL
            .into_iter()
            .find(|c| c.name() == cell.category)
            .ok_or_else(|| {
                EvalError::BadStructured(format!("unknown category '{}'", cell.category))
            })?;
        if let (Some(bleu), Some(accuracy)) = (cell.bleu, cell.accuracy) {
            cells[EvalReport::index(form, category)] = Some(ReportCell {
                bleu,
                accuracy,
                n_records: cell.n_records,
                n_terms: cell.n_terms,
            });
        }
    }
    Ok(EvalReport {
        corpus_id: doc.corpus,
        hypotheses_id: doc.hypotheses,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{evaluate, Hypotheses};
    use crate::testsupport::fixture_corpus;

    fn sample_report() -> EvalReport {
        let corpus = fixture_corpus();
        let hyps = Hypotheses::from_lines(
            "refs",
            corpus.records().iter().map(|r| r.ref_correct.clone()).collect(),
        );
        evaluate(&corpus, &hyps).unwrap()
    }

    #[test]
    fn markdown_has_the_canonical_header_row() {
        let text = render_report(&sample_report(), ReportFormat::Markdown);
        assert_eq!(text.matches("| | Correct | Wrong | Diff |").count(), 6);
        assert!(text.contains("### Category 1"));
        assert!(text.contains("| All | 100.0 |"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let report = sample_report();
        for format in [ReportFormat::Markdown, ReportFormat::Tsv, ReportFormat::Structured] {
            assert_eq!(render_report(&report, format), render_report(&report, format));
        }
    }

    #[test]
    fn tsv_has_one_row_per_cell_and_metric() {
        let text = render_report(&sample_report(), ReportFormat::Tsv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 9 * 2);
        assert!(lines[1].starts_with("all/overall\tbleu\t100\t"));
    }

    #[test]
    fn structured_round_trips_exactly() {
        let report = sample_report();
        let text = render_report(&report, ReportFormat::Structured);
        let back = parse_structured_report(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn absent_cells_render_as_dash() {
        let corpus = {
            let tsv = "ID\tTALK\tSRC\tREF-C\tREF-W\tSPEAKER\tFORM\tCATEGORY\tTERMS\n\
                 a\tt\ts\tbuona la cena qui\tbuono la cena qui\tF\tF\t1\tbuona:buono\n";
            crate::corpus::parse_corpus(tsv, "en-it").unwrap()
        };
        let hyps = Hypotheses::from_lines("h", vec!["buona la cena qui".into()]);
        let report = evaluate(&corpus, &hyps).unwrap();
        let md = render_report(&report, ReportFormat::Markdown);
        assert!(md.contains("| Masculine | – | – | – |"));
        let tsv = render_report(&report, ReportFormat::Tsv);
        assert!(tsv.contains("masculine/overall\tbleu\t–\t–\t–\t0\t0"));
    }

    #[test]
    fn bad_structured_input_is_reported() {
        assert!(parse_structured_report("{not json").is_err());
        assert!(parse_structured_report("{\"corpus\":\"c\",\"hypotheses\":\"h\",\"cells\":[{\"form\":\"nope\",\"category\":\"overall\",\"n_records\":0,\"n_terms\":0,\"bleu\":null,\"accuracy\":null}]}").is_err());
    }
}
