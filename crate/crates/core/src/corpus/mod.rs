//! Data model for dual-reference gender-annotated corpora: record types,
//! TSV parsing and serialization, validation, statistics and filtered
//! views.
//!
//! A corpus is immutable once constructed; views borrow it and can be
//! shared freely across threads.

mod parse;
mod validate;

pub use parse::{parse_corpus, parse_corpus_with, serialize_corpus, ColumnMap};
pub use validate::{validate, IssueKind, Severity, ValidationIssue};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Where the gender of the referent can be recovered from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Category {
    /// Disambiguated only by the speaker (audio-side information).
    Cat1,
    /// Disambiguated by the utterance content.
    Cat2,
}

impl Category {
    pub fn as_field(&self) -> &'static str {
        match self {
            Category::Cat1 => "1",
            Category::Cat2 => "2",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_field())
    }
}

/// Gender form of the annotated phenomena in a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum GenderForm {
    Feminine,
    Masculine,
}

impl GenderForm {
    pub fn as_field(&self) -> &'static str {
        match self {
            GenderForm::Feminine => "F",
            GenderForm::Masculine => "M",
        }
    }
}

/// Gender of the speaker of the segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum SpeakerGender {
    Female,
    Male,
}

impl SpeakerGender {
    pub fn as_field(&self) -> &'static str {
        match self {
            SpeakerGender::Female => "F",
            SpeakerGender::Male => "M",
        }
    }
}

/// One annotated gender-marked word: the form in the correct reference
/// and its opposite-gender counterpart in the wrong reference.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GenderTermPair {
    pub correct_form: String,
    pub wrong_form: String,
}

impl GenderTermPair {
    pub fn new(correct: impl Into<String>, wrong: impl Into<String>) -> Self {
        GenderTermPair {
            correct_form: correct.into(),
            wrong_form: wrong.into(),
        }
    }
}

/// One annotated segment: source text, correct and wrong references,
/// metadata and the term pairs (multiset semantics, at least one).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TripletRecord {
    pub id: String,
    pub talk: String,
    pub source: String,
    pub ref_correct: String,
    pub ref_wrong: String,
    pub speaker: SpeakerGender,
    pub form: GenderForm,
    pub category: Category,
    pub terms: Vec<GenderTermPair>,
}

/// An annotated corpus for one language pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub language_pair: String,
    records: Vec<TripletRecord>,
    /// Header columns that matched no known role and were ignored.
    pub(crate) extra_columns: Vec<String>,
}

/// Errors from corpus parsing and keyed operations.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("empty corpus: no header row")]
    EmptyFile,
    #[error("corpus has a header but no data rows")]
    NoRecords,
    #[error("header is missing required column '{0}'")]
    MissingColumn(String),
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
    #[error("duplicate key {0} within one corpus")]
    DuplicateKey(String),
    #[error("invalid column mapping: {0}")]
    BadColumnMap(String),
}

impl Corpus {
    /// Build a corpus from in-memory records. Fails on an empty record
    /// list; id uniqueness is the validator's concern.
    pub fn from_records(
        language_pair: impl Into<String>,
        records: Vec<TripletRecord>,
    ) -> Result<Self, CorpusError> {
        if records.is_empty() {
            return Err(CorpusError::NoRecords);
        }
        Ok(Corpus {
            language_pair: language_pair.into(),
            records,
            extra_columns: Vec::new(),
        })
    }

    pub fn records(&self) -> &[TripletRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// View over the whole corpus.
    pub fn view(&self) -> CorpusView<'_> {
        CorpusView {
            corpus: self,
            indices: (0..self.records.len()).collect(),
        }
    }

    /// View of the records matching a metadata selector, in corpus order.
    pub fn filter(&self, selector: &Selector) -> CorpusView<'_> {
        self.filter_by(|r| selector.matches(r))
    }

    /// View of the records matching an arbitrary predicate.
    pub fn filter_by(&self, mut predicate: impl FnMut(&TripletRecord) -> bool) -> CorpusView<'_> {
        CorpusView {
            corpus: self,
            indices: (0..self.records.len())
                .filter(|&i| predicate(&self.records[i]))
                .collect(),
        }
    }

    /// Exact swap of the correct and wrong sides of every record,
    /// term pairs included.
    pub fn swapped_references(&self) -> Corpus {
        let records = self
            .records
            .iter()
            .map(|r| TripletRecord {
                ref_correct: r.ref_wrong.clone(),
                ref_wrong: r.ref_correct.clone(),
                terms: r
                    .terms
                    .iter()
                    .map(|p| GenderTermPair::new(p.wrong_form.clone(), p.correct_form.clone()))
                    .collect(),
                ..r.clone()
            })
            .collect();
        Corpus {
            language_pair: self.language_pair.clone(),
            records,
            extra_columns: self.extra_columns.clone(),
        }
    }
}

/// Metadata predicate: `None` fields match everything.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Selector {
    pub category: Option<Category>,
    pub form: Option<GenderForm>,
    pub speaker: Option<SpeakerGender>,
}

impl Selector {
    pub fn category(category: Category) -> Self {
        Selector {
            category: Some(category),
            ..Default::default()
        }
    }

    pub fn form(form: GenderForm) -> Self {
        Selector {
            form: Some(form),
            ..Default::default()
        }
    }

    pub fn matches(&self, record: &TripletRecord) -> bool {
        self.category.is_none_or(|c| c == record.category)
            && self.form.is_none_or(|f| f == record.form)
            && self.speaker.is_none_or(|s| s == record.speaker)
    }
}

/// Order-preserving immutable view into a corpus.
#[derive(Debug, Clone)]
pub struct CorpusView<'a> {
    corpus: &'a Corpus,
    indices: Vec<usize>,
}

impl<'a> CorpusView<'a> {
    pub fn corpus(&self) -> &'a Corpus {
        self.corpus
    }

    /// Positions of the view's records in the parent corpus.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn records(&self) -> impl Iterator<Item = &'a TripletRecord> + '_ {
        self.indices.iter().map(move |&i| &self.corpus.records[i])
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Total annotated term tokens in the view.
    pub fn term_count(&self) -> usize {
        self.records().map(|r| r.terms.len()).sum()
    }
}

/// Per-cell and per-speaker corpus counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusStats {
    counts: BTreeMap<(Category, GenderForm), usize>,
    speaker_counts: BTreeMap<SpeakerGender, usize>,
    pub total_records: usize,
    pub total_term_tokens: usize,
}

impl CorpusStats {
    pub fn count(&self, category: Category, form: GenderForm) -> usize {
        self.counts.get(&(category, form)).copied().unwrap_or(0)
    }

    pub fn category_total(&self, category: Category) -> usize {
        self.count(category, GenderForm::Feminine) + self.count(category, GenderForm::Masculine)
    }

    pub fn form_total(&self, form: GenderForm) -> usize {
        self.count(Category::Cat1, form) + self.count(Category::Cat2, form)
    }

    pub fn speaker_count(&self, speaker: SpeakerGender) -> usize {
        self.speaker_counts.get(&speaker).copied().unwrap_or(0)
    }
}

/// Exact counts per (category, form) cell, per speaker gender, plus
/// record and term-token totals.
pub fn stats(corpus: &Corpus) -> CorpusStats {
    stats_of_view(&corpus.view())
}

/// Statistics over a filtered view.
pub fn stats_of_view(view: &CorpusView<'_>) -> CorpusStats {
    let mut counts = BTreeMap::new();
    let mut speaker_counts = BTreeMap::new();
    let mut total_term_tokens = 0;
    for record in view.records() {
        *counts.entry((record.category, record.form)).or_insert(0) += 1;
        *speaker_counts.entry(record.speaker).or_insert(0) += 1;
        total_term_tokens += record.terms.len();
    }
    CorpusStats {
        counts,
        speaker_counts,
        total_records: view.len(),
        total_term_tokens,
    }
}

fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Pairs of records present in both corpora, keyed by (talk,
/// whitespace-normalized source), in `a`'s order. A duplicate key
/// within either corpus is an error.
pub fn common_subset<'a, 'b>(
    a: &'a Corpus,
    b: &'b Corpus,
) -> Result<Vec<(&'a TripletRecord, &'b TripletRecord)>, CorpusError> {
    fn key(record: &TripletRecord) -> (String, String) {
        (
            record.talk.trim().to_string(),
            normalize_whitespace(&record.source),
        )
    }

    let mut b_by_key: BTreeMap<(String, String), &TripletRecord> = BTreeMap::new();
    for record in b.records() {
        let k = key(record);
        if b_by_key.insert(k.clone(), record).is_some() {
            return Err(CorpusError::DuplicateKey(format!("({}, {})", k.0, k.1)));
        }
    }
    let mut seen_a: BTreeMap<(String, String), ()> = BTreeMap::new();
    let mut pairs = Vec::new();
    for record in a.records() {
        let k = key(record);
        if seen_a.insert(k.clone(), ()).is_some() {
            return Err(CorpusError::DuplicateKey(format!("({}, {})", k.0, k.1)));
        }
        if let Some(other) = b_by_key.get(&k) {
            pairs.push((record, *other));
        }
    }
    Ok(pairs)
}
