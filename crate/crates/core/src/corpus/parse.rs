//! Canonical TSV schema: header `ID TALK SRC REF-C REF-W SPEAKER FORM
//! CATEGORY TERMS` (tab-separated), one record per row, TERMS as
//! semicolon-separated `correct:wrong` pairs. UTF-8, LF line endings,
//! header mandatory, leading BOM accepted and stripped. Unknown
//! columns are kept aside and surfaced as validation warnings.

use super::{
    Category, Corpus, CorpusError, GenderForm, GenderTermPair, SpeakerGender, TripletRecord,
};

const ROLES: usize = 9;

/// Maps the nine schema roles to header names, so officially released
/// files with different headers load without edits. Header comparison
/// is case-insensitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    names: [String; ROLES],
}

const ROLE_KEYS: [&str; ROLES] = [
    "ID", "TALK", "SRC", "REF-C", "REF-W", "SPEAKER", "FORM", "CATEGORY", "TERMS",
];

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            names: ROLE_KEYS.map(str::to_string),
        }
    }
}

impl ColumnMap {
    /// Parse a remapping spec like `REF-C=REF,REF-W=WRONG-REF`. Roles
    /// not mentioned keep their canonical names.
    pub fn from_spec(spec: &str) -> Result<Self, CorpusError> {
        let mut map = ColumnMap::default();
        for entry in spec.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (role, name) = entry
                .split_once('=')
                .ok_or_else(|| CorpusError::BadColumnMap(format!("'{entry}' is not ROLE=NAME")))?;
            let role = role.trim();
            let idx = ROLE_KEYS
                .iter()
                .position(|k| k.eq_ignore_ascii_case(role))
                .ok_or_else(|| CorpusError::BadColumnMap(format!("unknown role '{role}'")))?;
            map.names[idx] = name.trim().to_string();
        }
        Ok(map)
    }

    fn position_of(&self, role: usize, header: &[&str]) -> Option<usize> {
        header
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(&self.names[role]))
    }
}

fn strip_bom(text: &str) -> &str {
    text.strip_prefix('\u{feff}').unwrap_or(text)
}

fn parse_speaker(raw: &str) -> Option<SpeakerGender> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "f" | "female" | "she" => Some(SpeakerGender::Female),
        "m" | "male" | "he" => Some(SpeakerGender::Male),
        _ => None,
    }
}

fn parse_form(raw: &str) -> Option<GenderForm> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "f" | "fem" | "feminine" => Some(GenderForm::Feminine),
        "m" | "masc" | "masculine" => Some(GenderForm::Masculine),
        _ => None,
    }
}

fn parse_category(raw: &str) -> Option<Category> {
    match raw.trim() {
        "1" => Some(Category::Cat1),
        "2" => Some(Category::Cat2),
        _ => None,
    }
}

fn parse_terms(raw: &str, line: usize) -> Result<Vec<GenderTermPair>, CorpusError> {
    let mut pairs = Vec::new();
    for chunk in raw.split(';') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let (correct, wrong) = chunk.split_once(':').ok_or_else(|| CorpusError::Row {
            line,
            message: format!("TERMS entry '{chunk}' is not a correct:wrong pair"),
        })?;
        if correct.is_empty() || wrong.is_empty() || wrong.contains(':') {
            return Err(CorpusError::Row {
                line,
                message: format!("TERMS entry '{chunk}' is not a correct:wrong pair"),
            });
        }
        pairs.push(GenderTermPair::new(correct, wrong));
    }
    if pairs.is_empty() {
        return Err(CorpusError::Row {
            line,
            message: "TERMS must contain at least one correct:wrong pair".into(),
        });
    }
    Ok(pairs)
}

/// Parse the canonical TSV schema.
pub fn parse_corpus(tsv_text: &str, language_pair: &str) -> Result<Corpus, CorpusError> {
    parse_corpus_with(tsv_text, language_pair, &ColumnMap::default())
}

/// Parse with remapped header names.
pub fn parse_corpus_with(
    tsv_text: &str,
    language_pair: &str,
    columns: &ColumnMap,
) -> Result<Corpus, CorpusError> {
    let text = strip_bom(tsv_text);
    let mut lines = text.lines();
    let header_line = lines.next().filter(|l| !l.trim().is_empty()).ok_or(CorpusError::EmptyFile)?;
    let header: Vec<&str> = header_line.split('\t').collect();

    let mut positions = [0usize; ROLES];
    for (role, position) in positions.iter_mut().enumerate() {
        *position = columns
            .position_of(role, &header)
            .ok_or_else(|| CorpusError::MissingColumn(columns.names[role].clone()))?;
    }
    let extra_columns: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| !positions.contains(i))
        .map(|(_, name)| name.trim().to_string())
        .collect();

    let mut records = Vec::new();
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 2;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != header.len() {
            return Err(CorpusError::FieldCount {
                line: line_no,
                expected: header.len(),
                found: fields.len(),
            });
        }
        let field = |role: usize| fields[positions[role]];
        let speaker = parse_speaker(field(5)).ok_or_else(|| CorpusError::Row {
            line: line_no,
            message: format!("SPEAKER must be F or M, got '{}'", field(5)),
        })?;
        let form = parse_form(field(6)).ok_or_else(|| CorpusError::Row {
            line: line_no,
            message: format!("FORM must be F or M, got '{}'", field(6)),
        })?;
        let category = parse_category(field(7)).ok_or_else(|| CorpusError::Row {
            line: line_no,
            message: format!("CATEGORY must be 1 or 2, got '{}'", field(7)),
        })?;
        records.push(TripletRecord {
            id: field(0).trim().to_string(),
            talk: field(1).trim().to_string(),
            source: field(2).to_string(),
            ref_correct: field(3).to_string(),
            ref_wrong: field(4).to_string(),
            speaker,
            form,
            category,
            terms: parse_terms(field(8), line_no)?,
        });
    }
    if records.is_empty() {
        return Err(CorpusError::NoRecords);
    }
    Ok(Corpus {
        language_pair: language_pair.to_string(),
        records,
        extra_columns,
    })
}

/// Serialize to the canonical schema. Round-trips through
/// `parse_corpus` field for field.
pub fn serialize_corpus(corpus: &Corpus) -> String {
    let mut out = String::new();
    out.push_str(&ROLE_KEYS.join("\t"));
    out.push('\n');
    for r in corpus.records() {
        let terms = r
            .terms
            .iter()
            .map(|p| format!("{}:{}", p.correct_form, p.wrong_form))
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.id,
            r.talk,
            r.source,
            r.ref_correct,
            r.ref_wrong,
            r.speaker.as_field(),
            r.form.as_field(),
            r.category.as_field(),
            terms
        ));
    }
    out
}
