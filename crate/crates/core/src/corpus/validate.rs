//! Record-level invariant checks. Errors mean the corpus must not be
//! evaluated as-is; warnings flag legal but suspicious annotations.

use std::collections::HashMap;

use super::{Corpus, TripletRecord};
use crate::metrics::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl std::fmt::Display for Severity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueKind {
    /// A term form does not occur often enough in its reference.
    TermNotInRef,
    /// Correct and wrong references tokenize to different lengths.
    RefLengthMismatch,
    /// Reference token differences do not correspond one-to-one with
    /// the term pairs.
    DiffOutsideTerms,
    /// A pair whose swap yields an identical form.
    IdenticalPair,
    DuplicateId,
    /// Malformed or suspicious field content.
    BadField,
}

impl std::fmt::Display for IssueKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IssueKind::TermNotInRef => "TermNotInRef",
            IssueKind::RefLengthMismatch => "RefLengthMismatch",
            IssueKind::DiffOutsideTerms => "DiffOutsideTerms",
            IssueKind::IdenticalPair => "IdenticalPair",
            IssueKind::DuplicateId => "DuplicateId",
            IssueKind::BadField => "BadField",
        })
    }
}

/// One finding, citing the record it concerns (or `header`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub record_id: String,
    pub severity: Severity,
    pub kind: IssueKind,
    pub message: String,
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: record {}: {}: {}",
            self.severity, self.record_id, self.kind, self.message
        )
    }
}

fn fold(token: &str) -> String {
    token.to_lowercase()
}

fn token_counts(tokens: &[String]) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    for token in tokens {
        *counts.entry(fold(token)).or_insert(0) += 1;
    }
    counts
}

/// Empty iff every record invariant holds. Issue order follows record
/// order, so output is deterministic.
pub fn validate(corpus: &Corpus) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();

    for name in &corpus.extra_columns {
        issues.push(ValidationIssue {
            record_id: "header".into(),
            severity: Severity::Warning,
            kind: IssueKind::BadField,
            message: format!("unknown column '{name}' ignored"),
        });
    }

    let mut seen_ids: HashMap<&str, ()> = HashMap::new();
    for record in corpus.records() {
        if seen_ids.insert(&record.id, ()).is_some() {
            issues.push(ValidationIssue {
                record_id: record.id.clone(),
                severity: Severity::Error,
                kind: IssueKind::DuplicateId,
                message: format!("record id '{}' occurs more than once", record.id),
            });
        }
        validate_record(record, &mut issues);
    }
    issues
}

fn validate_record(record: &TripletRecord, issues: &mut Vec<ValidationIssue>) {
    let mut push = |severity, kind, message: String| {
        issues.push(ValidationIssue {
            record_id: record.id.clone(),
            severity,
            kind,
            message,
        })
    };

    // Delimiter discipline: ';' and ':' belong to the TERMS syntax only.
    for (name, value) in [
        ("ID", &record.id),
        ("TALK", &record.talk),
        ("SRC", &record.source),
        ("REF-C", &record.ref_correct),
        ("REF-W", &record.ref_wrong),
    ] {
        if value.contains([';', ':', '\t', '\n']) {
            push(
                Severity::Error,
                IssueKind::BadField,
                format!("field {name} contains a reserved delimiter character"),
            );
        }
    }

    let correct_tokens = tokenize(&record.ref_correct);
    let wrong_tokens = tokenize(&record.ref_wrong);
    let correct_counts = token_counts(&correct_tokens);
    let wrong_counts = token_counts(&wrong_tokens);

    let mut listed_correct: HashMap<String, usize> = HashMap::new();
    let mut listed_wrong: HashMap<String, usize> = HashMap::new();
    for pair in &record.terms {
        for (side, form) in [("correct", &pair.correct_form), ("wrong", &pair.wrong_form)] {
            if tokenize(form).len() != 1 {
                push(
                    Severity::Error,
                    IssueKind::BadField,
                    format!("{side} form '{form}' is not a single token"),
                );
            }
            if form.contains([';', ':', '\t', '\n']) {
                push(
                    Severity::Error,
                    IssueKind::BadField,
                    format!("{side} form '{form}' contains a reserved delimiter character"),
                );
            }
        }
        if fold(&pair.correct_form) == fold(&pair.wrong_form) {
            push(
                Severity::Error,
                IssueKind::IdenticalPair,
                format!(
                    "pair '{}:{}' swaps to an identical form",
                    pair.correct_form, pair.wrong_form
                ),
            );
        }
        *listed_correct.entry(fold(&pair.correct_form)).or_insert(0) += 1;
        *listed_wrong.entry(fold(&pair.wrong_form)).or_insert(0) += 1;

        if wrong_counts.contains_key(&fold(&pair.correct_form))
            && correct_counts.contains_key(&fold(&pair.wrong_form))
        {
            push(
                Severity::Warning,
                IssueKind::BadField,
                format!(
                    "both forms of pair '{}:{}' occur in both references; matches are ambiguous",
                    pair.correct_form, pair.wrong_form
                ),
            );
        }
    }

    let mut sorted_correct: Vec<_> = listed_correct.iter().collect();
    sorted_correct.sort();
    for (form, &needed) in sorted_correct {
        let found = correct_counts.get(form).copied().unwrap_or(0);
        if found < needed {
            push(
                Severity::Error,
                IssueKind::TermNotInRef,
                format!(
                    "correct form '{form}' listed {needed} time(s) but occurs {found} time(s) in REF-C"
                ),
            );
        }
    }
    let mut sorted_wrong: Vec<_> = listed_wrong.iter().collect();
    sorted_wrong.sort();
    for (form, &needed) in sorted_wrong {
        let found = wrong_counts.get(form).copied().unwrap_or(0);
        if found < needed {
            push(
                Severity::Error,
                IssueKind::TermNotInRef,
                format!(
                    "wrong form '{form}' listed {needed} time(s) but occurs {found} time(s) in REF-W"
                ),
            );
        }
    }

    if correct_tokens.len() != wrong_tokens.len() {
        push(
            Severity::Error,
            IssueKind::RefLengthMismatch,
            format!(
                "REF-C has {} tokens but REF-W has {}",
                correct_tokens.len(),
                wrong_tokens.len()
            ),
        );
        return;
    }

    // The positions where the references differ must realize exactly
    // the multiset of term pairs.
    let mut diff_pairs: HashMap<(String, String), usize> = HashMap::new();
    for (c, w) in correct_tokens.iter().zip(&wrong_tokens) {
        let (fc, fw) = (fold(c), fold(w));
        if fc != fw {
            *diff_pairs.entry((fc, fw)).or_insert(0) += 1;
        }
    }
    let mut listed_pairs: HashMap<(String, String), usize> = HashMap::new();
    for pair in &record.terms {
        if fold(&pair.correct_form) != fold(&pair.wrong_form) {
            *listed_pairs
                .entry((fold(&pair.correct_form), fold(&pair.wrong_form)))
                .or_insert(0) += 1;
        }
    }
    if diff_pairs != listed_pairs {
        let mut detail: Vec<String> = Vec::new();
        let mut keys: Vec<_> = diff_pairs.keys().chain(listed_pairs.keys()).collect();
        keys.sort();
        keys.dedup();
        for key in keys {
            let in_refs = diff_pairs.get(key).copied().unwrap_or(0);
            let listed = listed_pairs.get(key).copied().unwrap_or(0);
            if in_refs != listed {
                detail.push(format!(
                    "'{}:{}' differs {} time(s) in the references but is listed {} time(s)",
                    key.0, key.1, in_refs, listed
                ));
            }
        }
        push(
            Severity::Error,
            IssueKind::DiffOutsideTerms,
            detail.join("; "),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus;
    use crate::testsupport::fixture_corpus;

    fn single_record(terms: &str, ref_c: &str, ref_w: &str) -> Corpus {
        let tsv = format!(
            "ID\tTALK\tSRC\tREF-C\tREF-W\tSPEAKER\tFORM\tCATEGORY\tTERMS\n\
             r-1\tt\tsrc\t{ref_c}\t{ref_w}\tF\tF\t1\t{terms}\n"
        );
        parse_corpus(&tsv, "en-it").unwrap()
    }

    fn kinds(issues: &[ValidationIssue]) -> Vec<IssueKind> {
        issues.iter().map(|i| i.kind).collect()
    }

    #[test]
    fn consistent_fixture_is_clean() {
        assert!(validate(&fixture_corpus()).is_empty());
    }

    #[test]
    fn degenerate_swap_reports_diff_outside_terms() {
        let corpus = single_record("nata:nato", "Sono nata qui .", "Sono nata qui .");
        let issues = validate(&corpus);
        assert!(kinds(&issues).contains(&IssueKind::DiffOutsideTerms));
        assert!(kinds(&issues).contains(&IssueKind::TermNotInRef));
    }

    #[test]
    fn identical_pair_is_an_error() {
        let corpus = single_record("nato:nato", "Sono nato qui .", "Sono nato qui .");
        let issues = validate(&corpus);
        assert!(kinds(&issues).contains(&IssueKind::IdenticalPair));
    }

    #[test]
    fn missing_term_occurrence() {
        let corpus = single_record("nata:nato", "Sono qui .", "Sono nato qui .");
        let issues = validate(&corpus);
        assert!(kinds(&issues).contains(&IssueKind::TermNotInRef));
        // Length mismatch is also reported for these references.
        assert!(kinds(&issues).contains(&IssueKind::RefLengthMismatch));
    }

    #[test]
    fn length_mismatch_detected() {
        let corpus = single_record("nata:nato", "Sono nata proprio qui .", "Sono nato qui .");
        assert!(kinds(&validate(&corpus)).contains(&IssueKind::RefLengthMismatch));
    }

    #[test]
    fn diff_at_unlisted_position() {
        let corpus = single_record("nata:nato", "Sono nata qui .", "Sono nato lì .");
        let issues = validate(&corpus);
        assert_eq!(kinds(&issues), vec![IssueKind::DiffOutsideTerms]);
    }

    #[test]
    fn duplicate_ids_detected() {
        let tsv = "ID\tTALK\tSRC\tREF-C\tREF-W\tSPEAKER\tFORM\tCATEGORY\tTERMS\n\
                   r-1\tt\ts\tbuona x .\tbuono x .\tF\tF\t1\tbuona:buono\n\
                   r-1\tt\ts2\tcara y .\tcaro y .\tF\tF\t2\tcara:caro\n";
        let corpus = parse_corpus(tsv, "en-it").unwrap();
        let issues = validate(&corpus);
        assert_eq!(kinds(&issues), vec![IssueKind::DuplicateId]);
    }

    #[test]
    fn reserved_delimiters_flagged() {
        let corpus = single_record("nata:nato", "Sono nata qui ; ora .", "Sono nato qui ; ora .");
        let issues = validate(&corpus);
        assert!(issues
            .iter()
            .any(|i| i.kind == IssueKind::BadField && i.severity == Severity::Error));
    }

    #[test]
    fn multi_token_form_flagged() {
        // Construct in memory: the parser would not produce this shape.
        let mut corpus = fixture_corpus();
        let record = TripletRecord {
            terms: vec![crate::corpus::GenderTermPair::new("nata e", "nato e")],
            ..corpus.records()[0].clone()
        };
        corpus = Corpus::from_records("en-it", vec![record]).unwrap();
        let issues = validate(&corpus);
        assert!(issues
            .iter()
            .any(|i| i.kind == IssueKind::BadField && i.message.contains("single token")));
    }

    #[test]
    fn cross_reference_forms_warn() {
        // Both "brava" and "bravo" occur in both references; the pairs
        // are still structurally valid because the diff positions line up.
        let corpus = single_record(
            "brava:bravo;bravo:brava",
            "È brava e bravo .",
            "È bravo e brava .",
        );
        let issues = validate(&corpus);
        assert!(issues
            .iter()
            .any(|i| i.severity == Severity::Warning && i.message.contains("ambiguous")));
        assert!(!issues.iter().any(|i| i.severity == Severity::Error));
    }

    #[test]
    fn unknown_column_warns_citing_header() {
        let tsv = "ID\tTALK\tSRC\tREF-C\tREF-W\tSPEAKER\tFORM\tCATEGORY\tTERMS\tEXTRA\n\
                   r-1\tt\ts\tbuona x .\tbuono x .\tF\tF\t1\tbuona:buono\tmeta\n";
        let corpus = parse_corpus(tsv, "en-it").unwrap();
        let issues = validate(&corpus);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].record_id, "header");
        assert_eq!(issues[0].severity, Severity::Warning);
    }
}
