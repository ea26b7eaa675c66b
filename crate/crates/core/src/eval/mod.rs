//! The dual-reference evaluation protocol: BLEU and gender-term
//! accuracy against the correct and wrong reference sets, their
//! difference, and the breakdown over form and category splits.

mod report;

pub use report::{parse_structured_report, render_report, ReportFormat};

use thiserror::Error;

use crate::corpus::{Category, Corpus, CorpusView, GenderForm, Selector};
use crate::metrics::{corpus_bleu, term_accuracy, tokenize};

/// System output under evaluation, aligned line-for-line with the
/// corpus record order. Alignment is strictly positional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypotheses {
    pub label: String,
    lines: Vec<String>,
}

impl Hypotheses {
    /// One translation per line. The final newline is optional; blank
    /// interior lines count as (empty) translations.
    pub fn from_text(label: impl Into<String>, text: &str) -> Self {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        Hypotheses {
            label: label.into(),
            lines: text.lines().map(str::to_string).collect(),
        }
    }

    pub fn from_lines(label: impl Into<String>, lines: Vec<String>) -> Self {
        Hypotheses {
            label: label.into(),
            lines,
        }
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// A metric evaluated on the correct references, on the wrong
/// references, and their difference.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MetricTriplet {
    pub correct: f64,
    pub wrong: f64,
    pub diff: f64,
}

impl MetricTriplet {
    pub fn new(correct: f64, wrong: f64) -> Self {
        MetricTriplet {
            correct,
            wrong,
            diff: correct - wrong,
        }
    }
}

/// Metrics and coverage for one (form, category) split.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ReportCell {
    pub bleu: MetricTriplet,
    pub accuracy: MetricTriplet,
    pub n_records: usize,
    pub n_terms: usize,
}

/// Row axis of the report: all records or one gender form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormSplit {
    All,
    Feminine,
    Masculine,
}

impl FormSplit {
    pub const ALL: [FormSplit; 3] = [FormSplit::All, FormSplit::Feminine, FormSplit::Masculine];

    pub fn name(&self) -> &'static str {
        match self {
            FormSplit::All => "all",
            FormSplit::Feminine => "feminine",
            FormSplit::Masculine => "masculine",
        }
    }

    fn selector(&self) -> Option<GenderForm> {
        match self {
            FormSplit::All => None,
            FormSplit::Feminine => Some(GenderForm::Feminine),
            FormSplit::Masculine => Some(GenderForm::Masculine),
        }
    }
}

/// Column axis of the report: the whole corpus or one category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CategorySplit {
    Overall,
    Cat1,
    Cat2,
}

impl CategorySplit {
    pub const ALL: [CategorySplit; 3] =
        [CategorySplit::Overall, CategorySplit::Cat1, CategorySplit::Cat2];

    pub fn name(&self) -> &'static str {
        match self {
            CategorySplit::Overall => "overall",
            CategorySplit::Cat1 => "cat1",
            CategorySplit::Cat2 => "cat2",
        }
    }

    fn selector(&self) -> Option<Category> {
        match self {
            CategorySplit::Overall => None,
            CategorySplit::Cat1 => Some(Category::Cat1),
            CategorySplit::Cat2 => Some(Category::Cat2),
        }
    }
}

/// The full metric battery: BLEU and accuracy triplets for every
/// (form, category) split. Splits with no records are absent rather
/// than fabricated.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub corpus_id: String,
    pub hypotheses_id: String,
    cells: Vec<Option<ReportCell>>,
}

impl EvalReport {
    fn index(form: FormSplit, category: CategorySplit) -> usize {
        let f = FormSplit::ALL.iter().position(|s| *s == form).unwrap();
        let c = CategorySplit::ALL.iter().position(|s| *s == category).unwrap();
        f * CategorySplit::ALL.len() + c
    }

    pub fn cell(&self, form: FormSplit, category: CategorySplit) -> Option<&ReportCell> {
        self.cells[Self::index(form, category)].as_ref()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("hypotheses have {hypotheses} lines but the corpus has {records} records")]
    AlignmentMismatch { hypotheses: usize, records: usize },
    #[error("cannot score an empty view")]
    EmptyView,
    #[error("unreadable structured report: {0}")]
    BadStructured(String),
}

struct TokenizedSides {
    hyps: Vec<Vec<String>>,
    correct: Vec<Vec<String>>,
    wrong: Vec<Vec<String>>,
}

fn tokenize_sides(corpus: &Corpus, hyps: &Hypotheses) -> TokenizedSides {
    TokenizedSides {
        hyps: hyps.lines().iter().map(|l| tokenize(l)).collect(),
        correct: corpus.records().iter().map(|r| tokenize(&r.ref_correct)).collect(),
        wrong: corpus.records().iter().map(|r| tokenize(&r.ref_wrong)).collect(),
    }
}

fn check_alignment(corpus: &Corpus, hyps: &Hypotheses) -> Result<(), EvalError> {
    if hyps.len() != corpus.len() {
        return Err(EvalError::AlignmentMismatch {
            hypotheses: hyps.len(),
            records: corpus.len(),
        });
    }
    Ok(())
}

fn gather(all: &[Vec<String>], indices: &[usize]) -> Vec<Vec<String>> {
    indices.iter().map(|&i| all[i].clone()).collect()
}

fn bleu_of(view: &CorpusView<'_>, sides: &TokenizedSides) -> Result<MetricTriplet, EvalError> {
    if view.is_empty() {
        return Err(EvalError::EmptyView);
    }
    let hyps = gather(&sides.hyps, view.indices());
    let correct = corpus_bleu(&hyps, &gather(&sides.correct, view.indices()));
    let wrong = corpus_bleu(&hyps, &gather(&sides.wrong, view.indices()));
    Ok(MetricTriplet::new(correct.score, wrong.score))
}

fn accuracy_of(view: &CorpusView<'_>, sides: &TokenizedSides) -> Result<MetricTriplet, EvalError> {
    if view.is_empty() {
        return Err(EvalError::EmptyView);
    }
    let mut matched_correct = 0usize;
    let mut matched_wrong = 0usize;
    let mut total = 0usize;
    for &i in view.indices() {
        let record = &view.corpus().records()[i];
        let correct_forms: Vec<String> =
            record.terms.iter().map(|p| p.correct_form.clone()).collect();
        let wrong_forms: Vec<String> = record.terms.iter().map(|p| p.wrong_form.clone()).collect();
        let on_correct = term_accuracy(&sides.hyps[i], &correct_forms);
        let on_wrong = term_accuracy(&sides.hyps[i], &wrong_forms);
        matched_correct += on_correct.matched;
        matched_wrong += on_wrong.matched;
        total += record.terms.len();
    }
    // Micro-average: pool matched/total over the view's records.
    Ok(MetricTriplet::new(
        matched_correct as f64 / total as f64,
        matched_wrong as f64 / total as f64,
    ))
}

/// Dual-reference BLEU over a view: the same hypotheses scored against
/// the correct and the wrong reference sets.
pub fn bleu_triplet(view: &CorpusView<'_>, hyps: &Hypotheses) -> Result<MetricTriplet, EvalError> {
    check_alignment(view.corpus(), hyps)?;
    bleu_of(view, &tokenize_sides(view.corpus(), hyps))
}

/// Dual gender-term accuracy over a view, micro-averaged.
pub fn accuracy_triplet(
    view: &CorpusView<'_>,
    hyps: &Hypotheses,
) -> Result<MetricTriplet, EvalError> {
    check_alignment(view.corpus(), hyps)?;
    accuracy_of(view, &tokenize_sides(view.corpus(), hyps))
}

/// Run the whole protocol: every (form, category) split gets BLEU and
/// accuracy triplets plus record/term coverage.
pub fn evaluate(corpus: &Corpus, hyps: &Hypotheses) -> Result<EvalReport, EvalError> {
    check_alignment(corpus, hyps)?;
    let sides = tokenize_sides(corpus, hyps);
    let mut cells = Vec::with_capacity(9);
    for form in FormSplit::ALL {
        for category in CategorySplit::ALL {
            let selector = Selector {
                form: form.selector(),
                category: category.selector(),
                speaker: None,
            };
            let view = corpus.filter(&selector);
            if view.is_empty() {
                cells.push(None);
            } else {
                cells.push(Some(ReportCell {
                    bleu: bleu_of(&view, &sides)?,
                    accuracy: accuracy_of(&view, &sides)?,
                    n_records: view.len(),
                    n_terms: view.term_count(),
                }));
            }
        }
    }
    Ok(EvalReport {
        corpus_id: corpus.language_pair.clone(),
        hypotheses_id: hyps.label.clone(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus;
    use crate::testsupport::{bleu_oracle, fixture_corpus, random_hypotheses, random_valid_corpus};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn correct_refs(corpus: &Corpus) -> Hypotheses {
        Hypotheses::from_lines(
            "correct-refs",
            corpus.records().iter().map(|r| r.ref_correct.clone()).collect(),
        )
    }

    fn wrong_refs(corpus: &Corpus) -> Hypotheses {
        Hypotheses::from_lines(
            "wrong-refs",
            corpus.records().iter().map(|r| r.ref_wrong.clone()).collect(),
        )
    }

    #[test]
    fn identity_hypotheses_score_100_with_positive_diff() {
        let corpus = fixture_corpus();
        let triplet = bleu_triplet(&corpus.view(), &correct_refs(&corpus)).unwrap();
        assert_eq!(triplet.correct, 100.0);
        assert!(triplet.wrong < 100.0);
        assert!(triplet.diff > 0.0);
    }

    #[test]
    fn wrong_reference_hypotheses_mirror() {
        let corpus = fixture_corpus();
        let triplet = bleu_triplet(&corpus.view(), &wrong_refs(&corpus)).unwrap();
        assert_eq!(triplet.wrong, 100.0);
        assert!(triplet.diff < 0.0);
    }

    #[test]
    fn bleu_triplet_matches_hand_built_two_segment_fixture() {
        let tsv = "ID\tTALK\tSRC\tREF-C\tREF-W\tSPEAKER\tFORM\tCATEGORY\tTERMS\n\
             a\tt\ts1\tbuona la cena qui\tbuono la cena qui\tF\tF\t1\tbuona:buono\n\
             b\tt\ts2\tcara mia amica bella\tcaro mia amica bella\tF\tF\t2\tcara:caro\n";
        let corpus = parse_corpus(tsv, "en-it").unwrap();
        let hyps = Hypotheses::from_lines(
            "hand",
            vec!["buona la cena".into(), "cara mia amica bella".into()],
        );
        let triplet = bleu_triplet(&corpus.view(), &hyps).unwrap();

        let hyp_toks: Vec<Vec<String>> = hyps.lines().iter().map(|l| crate::metrics::tokenize(l)).collect();
        let refc: Vec<Vec<String>> = corpus.records().iter().map(|r| crate::metrics::tokenize(&r.ref_correct)).collect();
        let refw: Vec<Vec<String>> = corpus.records().iter().map(|r| crate::metrics::tokenize(&r.ref_wrong)).collect();
        let expect_correct = bleu_oracle(&hyp_toks, &refc);
        let expect_wrong = bleu_oracle(&hyp_toks, &refw);
        assert!((triplet.correct - expect_correct.score).abs() < 1e-9);
        assert!((triplet.wrong - expect_wrong.score).abs() < 1e-9);
        assert!((triplet.diff - (expect_correct.score - expect_wrong.score)).abs() < 1e-12);
    }

    #[test]
    fn accuracy_identity_and_mirror() {
        let corpus = fixture_corpus();
        let on_correct = accuracy_triplet(&corpus.view(), &correct_refs(&corpus)).unwrap();
        assert_eq!(on_correct.correct, 1.0);
        assert_eq!(on_correct.wrong, 0.0);
        assert_eq!(on_correct.diff, 1.0);

        let on_wrong = accuracy_triplet(&corpus.view(), &wrong_refs(&corpus)).unwrap();
        assert_eq!(on_wrong.correct, 0.0);
        assert_eq!(on_wrong.wrong, 1.0);
    }

    #[test]
    fn accuracy_half_swapped_hypothesis() {
        // "Sono nato e cresciuta a Mumbai": one correct form kept, one
        // wrong form produced; both sides match exactly once.
        let corpus = fixture_corpus();
        let first = corpus.filter_by(|r| r.id == "t1-1");
        let mut lines: Vec<String> = corpus.records().iter().map(|r| r.ref_correct.clone()).collect();
        lines[0] = "Sono nato e cresciuta a Mumbai.".into();
        let hyps = Hypotheses::from_lines("half", lines);
        let triplet = accuracy_triplet(&first, &hyps).unwrap();
        assert_eq!(triplet.correct, 0.5);
        assert_eq!(triplet.wrong, 0.5);
        assert_eq!(triplet.diff, 0.0);
    }

    #[test]
    fn accuracy_absent_forms_contribute_zero() {
        let corpus = fixture_corpus();
        let first = corpus.filter_by(|r| r.id == "t1-1");
        let mut lines: Vec<String> = corpus.records().iter().map(|r| r.ref_correct.clone()).collect();
        lines[0] = "qualcosa di completamente diverso".into();
        let triplet = accuracy_triplet(&first, &Hypotheses::from_lines("none", lines)).unwrap();
        assert_eq!(triplet.correct, 0.0);
        assert_eq!(triplet.wrong, 0.0);
    }

    #[test]
    fn empty_view_is_an_error() {
        let corpus = fixture_corpus();
        let view = corpus.filter_by(|_| false);
        assert_eq!(
            bleu_triplet(&view, &correct_refs(&corpus)).unwrap_err(),
            EvalError::EmptyView
        );
    }

    #[test]
    fn alignment_mismatch_reports_both_counts() {
        let corpus = fixture_corpus();
        let hyps = Hypotheses::from_lines("short", vec!["una".into()]);
        assert_eq!(
            evaluate(&corpus, &hyps).unwrap_err(),
            EvalError::AlignmentMismatch {
                hypotheses: 1,
                records: 4
            }
        );
    }

    #[test]
    fn evaluate_fills_every_cell_on_the_fixture() {
        let corpus = fixture_corpus();
        let report = evaluate(&corpus, &correct_refs(&corpus)).unwrap();
        for form in FormSplit::ALL {
            for category in CategorySplit::ALL {
                let cell = report.cell(form, category).expect("cell present");
                assert_eq!(cell.bleu.correct, 100.0);
                assert_eq!(cell.accuracy.correct, 1.0);
                assert_eq!(cell.accuracy.wrong, 0.0);
                assert!(cell.bleu.diff > 0.0);
            }
        }
        let report = evaluate(&corpus, &wrong_refs(&corpus)).unwrap();
        for form in FormSplit::ALL {
            for category in CategorySplit::ALL {
                let cell = report.cell(form, category).expect("cell present");
                assert_eq!(cell.bleu.wrong, 100.0);
                assert_eq!(cell.accuracy.wrong, 1.0);
                assert_eq!(cell.accuracy.correct, 0.0);
            }
        }
    }

    #[test]
    fn empty_cells_are_absent_not_fabricated() {
        let corpus = {
            let tsv = "ID\tTALK\tSRC\tREF-C\tREF-W\tSPEAKER\tFORM\tCATEGORY\tTERMS\n\
                 a\tt\ts\tbuona la cena qui\tbuono la cena qui\tF\tF\t1\tbuona:buono\n";
            parse_corpus(tsv, "en-it").unwrap()
        };
        let report = evaluate(&corpus, &correct_refs(&corpus)).unwrap();
        assert!(report.cell(FormSplit::Feminine, CategorySplit::Cat1).is_some());
        assert!(report.cell(FormSplit::Masculine, CategorySplit::Overall).is_none());
        assert!(report.cell(FormSplit::All, CategorySplit::Cat2).is_none());
    }

    #[test]
    fn partition_sums_hold_on_randomized_fixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let corpus = random_valid_corpus(&mut rng, 24);
            let hyps = Hypotheses::from_lines("rand", random_hypotheses(&mut rng, &corpus));
            let report = evaluate(&corpus, &hyps).unwrap();
            for category in CategorySplit::ALL {
                let all = report.cell(FormSplit::All, category);
                let fem = report.cell(FormSplit::Feminine, category);
                let masc = report.cell(FormSplit::Masculine, category);
                let sum = |f: fn(&ReportCell) -> usize| {
                    fem.map_or(0, f) + masc.map_or(0, f)
                };
                if let Some(all) = all {
                    assert_eq!(all.n_records, sum(|c| c.n_records));
                    assert_eq!(all.n_terms, sum(|c| c.n_terms));
                }
            }
        }
    }

    #[test]
    fn adding_a_missing_correct_form_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let corpus = random_valid_corpus(&mut rng, 10);
            let mut lines = random_hypotheses(&mut rng, &corpus);
            // Find a record with a correct form absent from its line,
            // whose wrong counterpart differs from it.
            let target = corpus.records().iter().enumerate().find_map(|(i, r)| {
                let toks = crate::metrics::tokenize(&lines[i]);
                r.terms
                    .iter()
                    .find(|p| !toks.iter().any(|t| t.eq_ignore_ascii_case(&p.correct_form)))
                    .map(|p| (i, p.correct_form.clone()))
            });
            let Some((idx, form)) = target else { continue };
            let before = accuracy_triplet(
                &corpus.view(),
                &Hypotheses::from_lines("h", lines.clone()),
            )
            .unwrap();
            lines[idx] = format!("{} {form}", lines[idx]);
            let after =
                accuracy_triplet(&corpus.view(), &Hypotheses::from_lines("h", lines)).unwrap();
            assert!(after.correct > before.correct);
            assert_eq!(after.wrong, before.wrong);
        }
    }

    #[test]
    fn antisymmetry_under_reference_swap() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let corpus = random_valid_corpus(&mut rng, 16);
        let hyps = Hypotheses::from_lines("rand", random_hypotheses(&mut rng, &corpus));
        let report = evaluate(&corpus, &hyps).unwrap();
        let mirrored = evaluate(&corpus.swapped_references(), &hyps).unwrap();
        for form in FormSplit::ALL {
            for category in CategorySplit::ALL {
                match (report.cell(form, category), mirrored.cell(form, category)) {
                    (Some(a), Some(b)) => {
                        assert_eq!(a.bleu.correct, b.bleu.wrong);
                        assert_eq!(a.bleu.wrong, b.bleu.correct);
                        assert_eq!(a.bleu.diff, -b.bleu.diff);
                        assert_eq!(a.accuracy.diff, -b.accuracy.diff);
                    }
                    (None, None) => {}
                    _ => panic!("cell presence must not change under the swap"),
                }
            }
        }
    }
}
