//! Morphological gender swapping: an exception lexicon consulted
//! first, then ordered suffix rules. A token neither side covers is a
//! hard `NoRule` error so it can be routed to human review — it is
//! never passed through silently.

use std::collections::BTreeMap;

use unicode_normalization::UnicodeNormalization;

use super::BuildError;
use crate::corpus::GenderTermPair;
use crate::metrics::tokenize_spans;

/// One suffix alternation. Lower priority values are tried first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixRule {
    pub masculine_suffix: String,
    pub feminine_suffix: String,
    pub priority: u32,
}

/// Exceptions and suffix rules for one target language.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LanguageLexicon {
    /// Lowercased token -> lowercased opposite-gender token. Always an
    /// involution: inserting m->f also inserts f->m.
    exceptions: BTreeMap<String, String>,
    /// Sorted by ascending priority.
    suffix_rules: Vec<SuffixRule>,
}

impl LanguageLexicon {
    pub fn add_exception(&mut self, masculine: &str, feminine: &str) -> Result<(), BuildError> {
        let m = masculine.to_lowercase();
        let f = feminine.to_lowercase();
        if m == f {
            return Err(BuildError::BadLexicon(format!(
                "exception pair '{masculine}:{feminine}' maps a token to itself"
            )));
        }
        for key in [&m, &f] {
            if self.exceptions.contains_key(key) {
                return Err(BuildError::BadLexicon(format!(
                    "token '{key}' appears in more than one exception pair"
                )));
            }
        }
        self.exceptions.insert(m.clone(), f.clone());
        self.exceptions.insert(f, m);
        Ok(())
    }

    pub fn add_suffix_rule(&mut self, rule: SuffixRule) -> Result<(), BuildError> {
        if rule.masculine_suffix == rule.feminine_suffix {
            return Err(BuildError::BadLexicon(format!(
                "suffix pair '{}:{}' is not distinct",
                rule.masculine_suffix, rule.feminine_suffix
            )));
        }
        if rule.masculine_suffix.is_empty() || rule.feminine_suffix.is_empty() {
            return Err(BuildError::BadLexicon("empty suffix".into()));
        }
        if self.suffix_rules.iter().any(|r| r.priority == rule.priority) {
            return Err(BuildError::BadLexicon(format!(
                "duplicate suffix rule priority {}",
                rule.priority
            )));
        }
        self.suffix_rules.push(rule);
        self.suffix_rules.sort_by_key(|r| r.priority);
        Ok(())
    }

    pub fn exceptions(&self) -> impl Iterator<Item = (&str, &str)> {
        self.exceptions.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn suffix_rules(&self) -> &[SuffixRule] {
        &self.suffix_rules
    }

    fn is_empty(&self) -> bool {
        self.exceptions.is_empty() && self.suffix_rules.is_empty()
    }
}

/// Per-language swap tables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SwapLexicon {
    languages: BTreeMap<String, LanguageLexicon>,
}

impl SwapLexicon {
    pub fn language_mut(&mut self, language: &str) -> &mut LanguageLexicon {
        self.languages.entry(language.to_string()).or_default()
    }

    pub fn language(&self, language: &str) -> Option<&LanguageLexicon> {
        self.languages.get(language)
    }

    pub fn languages(&self) -> impl Iterator<Item = (&str, &LanguageLexicon)> {
        self.languages.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Exceptions TSV: `LANG MASC FEM`, one pair per row.
pub fn parse_exceptions(tsv: &str, into: &mut SwapLexicon) -> Result<(), BuildError> {
    let text = tsv.strip_prefix('\u{feff}').unwrap_or(tsv);
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| BuildError::BadLexicon("empty exceptions file".into()))?;
    if header.split('\t').map(str::trim).collect::<Vec<_>>() != ["LANG", "MASC", "FEM"] {
        return Err(BuildError::BadLexicon(
            "exceptions header must be LANG\\tMASC\\tFEM".into(),
        ));
    }
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(BuildError::BadLine {
                line: idx + 1,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        into.language_mut(fields[0].trim())
            .add_exception(fields[1].trim(), fields[2].trim())?;
    }
    Ok(())
}

/// Suffix rules TSV: `LANG MASC-SUFFIX FEM-SUFFIX PRIORITY`.
pub fn parse_suffix_rules(tsv: &str, into: &mut SwapLexicon) -> Result<(), BuildError> {
    let text = tsv.strip_prefix('\u{feff}').unwrap_or(tsv);
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| BuildError::BadLexicon("empty suffix rules file".into()))?;
    if header.split('\t').map(str::trim).collect::<Vec<_>>()
        != ["LANG", "MASC-SUFFIX", "FEM-SUFFIX", "PRIORITY"]
    {
        return Err(BuildError::BadLexicon(
            "suffix header must be LANG\\tMASC-SUFFIX\\tFEM-SUFFIX\\tPRIORITY".into(),
        ));
    }
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(BuildError::BadLine {
                line: idx + 1,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let priority = fields[3].trim().parse::<u32>().map_err(|_| BuildError::BadLine {
            line: idx + 1,
            message: format!("PRIORITY '{}' is not a number", fields[3]),
        })?;
        into.language_mut(fields[0].trim()).add_suffix_rule(SuffixRule {
            masculine_suffix: fields[1].trim().to_lowercase(),
            feminine_suffix: fields[2].trim().to_lowercase(),
            priority,
        })?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CasePattern {
    Lower,
    Title,
    Upper,
    Mixed,
}

fn case_pattern(token: &str) -> CasePattern {
    let mut chars = token.chars();
    let first_upper = chars.next().is_some_and(|c| c.is_uppercase());
    let rest_lower = chars.clone().all(|c| !c.is_uppercase());
    let rest_upper = token.chars().skip(1).any(|c| c.is_uppercase());
    if !first_upper && !rest_upper {
        CasePattern::Lower
    } else if first_upper && rest_lower {
        CasePattern::Title
    } else if token.chars().all(|c| !c.is_lowercase()) {
        CasePattern::Upper
    } else {
        CasePattern::Mixed
    }
}

fn apply_case(pattern: CasePattern, lower: &str) -> String {
    match pattern {
        CasePattern::Lower | CasePattern::Mixed => lower.to_string(),
        CasePattern::Upper => lower.to_uppercase(),
        CasePattern::Title => {
            let mut chars = lower.chars();
            match chars.next() {
                Some(first) => first.to_uppercase().chain(chars).collect(),
                None => String::new(),
            }
        }
    }
}

fn strip_suffix_ci<'a>(folded: &'a str, suffix: &str) -> Option<&'a str> {
    folded.strip_suffix(suffix).filter(|stem| !stem.is_empty())
}

/// Swap one token to its opposite gender form. The exception map wins;
/// otherwise the first suffix rule (by priority, longer side first
/// within a rule) whose masculine or feminine suffix matches the token
/// end is applied in the corresponding direction.
pub fn swap_token(token: &str, language: &str, lexicon: &SwapLexicon) -> Result<String, BuildError> {
    let tables = lexicon.language(language);
    let folded = token.to_lowercase();
    let pattern = case_pattern(token);
    let tables = match tables {
        Some(t) if !t.is_empty() => t,
        _ => return Err(BuildError::NoRule(token.to_string())),
    };
    if let Some(opposite) = tables.exceptions.get(&folded) {
        return Ok(apply_case(pattern, opposite));
    }
    for rule in &tables.suffix_rules {
        let masc_first = rule.masculine_suffix.len() >= rule.feminine_suffix.len();
        let ordered = if masc_first {
            [
                (&rule.masculine_suffix, &rule.feminine_suffix),
                (&rule.feminine_suffix, &rule.masculine_suffix),
            ]
        } else {
            [
                (&rule.feminine_suffix, &rule.masculine_suffix),
                (&rule.masculine_suffix, &rule.feminine_suffix),
            ]
        };
        for (matched, replacement) in ordered {
            if let Some(folded_stem) = strip_suffix_ci(&folded, matched) {
                // Keep the original casing of the stem when the fold
                // preserved char counts; fall back to the folded stem.
                let stem_chars = folded_stem.chars().count();
                let stem: String = if token.chars().count() == folded.chars().count() {
                    token.chars().take(stem_chars).collect()
                } else {
                    folded_stem.to_string()
                };
                let suffix = if pattern == CasePattern::Upper {
                    replacement.to_uppercase()
                } else {
                    replacement.clone()
                };
                return Ok(format!("{stem}{suffix}"));
            }
        }
    }
    Err(BuildError::NoRule(token.to_string()))
}

/// Swap every listed term occurrence inside a reference. Matching is
/// case-insensitive and leftmost-first, limited to each token's listed
/// multiplicity; every other byte of the (NFC-normalized) reference is
/// preserved. Returns the wrong reference and the correct:wrong pairs
/// in occurrence order.
pub fn swap_terms(
    reference: &str,
    term_tokens: &[String],
    language: &str,
    lexicon: &SwapLexicon,
) -> Result<(String, Vec<GenderTermPair>), BuildError> {
    let normalized: String = reference.nfc().collect();
    let tokens = tokenize_spans(&normalized);

    let mut remaining: BTreeMap<String, usize> = BTreeMap::new();
    for term in term_tokens {
        *remaining.entry(term.to_lowercase()).or_insert(0) += 1;
    }

    let mut replacements: Vec<(std::ops::Range<usize>, String, GenderTermPair)> = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    for (token, span) in &tokens {
        let folded = token.to_lowercase();
        let Some(count) = remaining.get_mut(&folded) else {
            continue;
        };
        if *count == 0 {
            continue;
        }
        *count -= 1;
        match swap_token(token, language, lexicon) {
            Ok(swapped) => {
                let pair = GenderTermPair::new(token.clone(), swapped.clone());
                replacements.push((span.clone(), swapped, pair));
            }
            Err(BuildError::NoRule(_)) => {
                if !failures.contains(&folded) {
                    failures.push(folded.clone());
                }
            }
            Err(other) => return Err(other),
        }
    }

    let missing: Vec<String> = remaining
        .iter()
        .filter(|(_, &count)| count > 0)
        .map(|(term, _)| term.clone())
        .collect();
    if let Some(first) = missing.first() {
        return Err(BuildError::TermNotFound(if missing.len() == 1 {
            first.clone()
        } else {
            missing.join(", ")
        }));
    }
    if !failures.is_empty() {
        return Err(BuildError::NoRules(failures));
    }

    let mut wrong = String::with_capacity(normalized.len());
    let mut cursor = 0;
    let mut pairs = Vec::with_capacity(replacements.len());
    for (span, swapped, pair) in replacements {
        wrong.push_str(&normalized[cursor..span.start]);
        wrong.push_str(&swapped);
        cursor = span.end;
        pairs.push(pair);
    }
    wrong.push_str(&normalized[cursor..]);
    Ok((wrong, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn lexicon() -> &'static SwapLexicon {
        builtin::lexicon()
    }

    #[test]
    fn italian_participles_swap_both_ways() {
        assert_eq!(swap_token("nata", "it", lexicon()).unwrap(), "nato");
        assert_eq!(swap_token("nato", "it", lexicon()).unwrap(), "nata");
        assert_eq!(swap_token("cresciuta", "it", lexicon()).unwrap(), "cresciuto");
    }

    #[test]
    fn french_exception_pair() {
        assert_eq!(swap_token("un", "fr", lexicon()).unwrap(), "une");
        assert_eq!(swap_token("une", "fr", lexicon()).unwrap(), "un");
    }

    #[test]
    fn unknown_token_is_a_no_rule_error() {
        let empty = SwapLexicon::default();
        assert_eq!(
            swap_token("xyzq", "it", &empty).unwrap_err(),
            BuildError::NoRule("xyzq".into())
        );
        assert_eq!(
            swap_token("qqqq", "it", lexicon()).unwrap_err(),
            BuildError::NoRule("qqqq".into())
        );
    }

    #[test]
    fn derivational_suffixes_take_priority() {
        assert_eq!(swap_token("innovatori", "it", lexicon()).unwrap(), "innovatrici");
        assert_eq!(swap_token("innovatrice", "it", lexicon()).unwrap(), "innovatore");
        assert_eq!(swap_token("pittore", "it", lexicon()).unwrap(), "pittrice");
    }

    #[test]
    fn case_patterns_are_preserved() {
        assert_eq!(swap_token("Nata", "it", lexicon()).unwrap(), "Nato");
        assert_eq!(swap_token("NATA", "it", lexicon()).unwrap(), "NATO");
        assert_eq!(swap_token("Uno", "it", lexicon()).unwrap(), "Una");
        assert_eq!(swap_token("UNO", "it", lexicon()).unwrap(), "UNA");
    }

    #[test]
    fn exceptions_win_over_suffix_rules() {
        // The i/e rule would mangle these plurals.
        assert_eq!(swap_token("suoi", "it", lexicon()).unwrap(), "sue");
        assert_eq!(swap_token("amiche", "it", lexicon()).unwrap(), "amici");
        assert_eq!(swap_token("delle", "it", lexicon()).unwrap(), "dei");
    }

    #[test]
    fn swap_terms_table_examples() {
        let (wrong, pairs) = swap_terms(
            "Sono nata e cresciuta a Mumbai.",
            &["nata".into(), "cresciuta".into()],
            "it",
            lexicon(),
        )
        .unwrap();
        assert_eq!(wrong, "Sono nato e cresciuto a Mumbai.");
        assert_eq!(
            pairs,
            vec![
                GenderTermPair::new("nata", "nato"),
                GenderTermPair::new("cresciuta", "cresciuto"),
            ]
        );

        let (wrong, pairs) = swap_terms(
            "Je suis née et j'ai grandi à Mumbai.",
            &["née".into()],
            "fr",
            lexicon(),
        )
        .unwrap();
        assert_eq!(wrong, "Je suis né et j'ai grandi à Mumbai.");
        assert_eq!(pairs, vec![GenderTermPair::new("née", "né")]);
    }

    #[test]
    fn swap_terms_missing_term_is_named() {
        let err = swap_terms("Sono qui.", &["nata".into()], "it", lexicon()).unwrap_err();
        assert_eq!(err, BuildError::TermNotFound("nata".into()));
    }

    #[test]
    fn swap_terms_collects_all_failures() {
        let err = swap_terms(
            "zzz www sono qui.",
            &["zzz".into(), "www".into()],
            "it",
            lexicon(),
        )
        .unwrap_err();
        assert_eq!(err, BuildError::NoRules(vec!["zzz".into(), "www".into()]));
    }

    #[test]
    fn swap_terms_respects_multiplicity_leftmost_first() {
        let (wrong, pairs) = swap_terms(
            "brava gente e brava banda e brava sorte",
            &["brava".into(), "brava".into()],
            "it",
            lexicon(),
        )
        .unwrap();
        assert_eq!(wrong, "bravo gente e bravo banda e brava sorte");
        assert_eq!(pairs.len(), 2);
    }

    #[test]
    fn swap_terms_output_validates_as_a_record() {
        use crate::corpus::{
            validate, Category, Corpus, GenderForm, SpeakerGender, TripletRecord,
        };
        let reference = "Sono nata e cresciuta a Mumbai.";
        let (wrong, pairs) = swap_terms(
            reference,
            &["nata".into(), "cresciuta".into()],
            "it",
            lexicon(),
        )
        .unwrap();
        let corpus = Corpus::from_records(
            "en-it",
            vec![TripletRecord {
                id: "r-1".into(),
                talk: "t".into(),
                source: "I was born and brought up in Mumbai.".into(),
                ref_correct: reference.into(),
                ref_wrong: wrong,
                speaker: SpeakerGender::Female,
                form: GenderForm::Feminine,
                category: Category::Cat1,
                terms: pairs,
            }],
        )
        .unwrap();
        assert!(validate(&corpus).is_empty());
    }

    #[test]
    fn lexicon_validation_rejects_broken_tables() {
        let mut lex = SwapLexicon::default();
        assert!(lex.language_mut("it").add_exception("uno", "uno").is_err());
        lex.language_mut("it").add_exception("uno", "una").unwrap();
        assert!(lex.language_mut("it").add_exception("una", "la").is_err());
        assert!(lex
            .language_mut("it")
            .add_suffix_rule(SuffixRule {
                masculine_suffix: "o".into(),
                feminine_suffix: "o".into(),
                priority: 1,
            })
            .is_err());
        lex.language_mut("it")
            .add_suffix_rule(SuffixRule {
                masculine_suffix: "o".into(),
                feminine_suffix: "a".into(),
                priority: 1,
            })
            .unwrap();
        assert!(lex
            .language_mut("it")
            .add_suffix_rule(SuffixRule {
                masculine_suffix: "i".into(),
                feminine_suffix: "e".into(),
                priority: 1,
            })
            .is_err());
    }
}
