//! Mining rules: a source-side and a target-side regular expression
//! per rule, labeled with the category and gender form they detect.
//! `{OCC}`, `{ADJ_F}` and `{ADJ_M}` placeholders expand to whole-word
//! alternations over the wordlists before compilation.
//!
//! The supported dialect is the common regex subset: literals,
//! character classes, alternation, anchors, word boundaries, repetition
//! and capturing groups. Backreferences are not supported.

use regex::Regex;

use super::BuildError;
use crate::corpus::{Category, GenderForm};

/// One uncompiled mining rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningRule {
    pub id: String,
    pub language_pair: String,
    pub category: Category,
    pub form: GenderForm,
    pub source_pattern: String,
    pub target_pattern: String,
}

/// Wordlists referenced by rule placeholders.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordLists {
    pub occupations: Vec<String>,
    pub adjectives_f: Vec<String>,
    pub adjectives_m: Vec<String>,
}

/// A rule with both sides compiled, ready for mining.
#[derive(Debug, Clone)]
pub struct CompiledRule {
    pub rule: MiningRule,
    pub source: Regex,
    pub target: Regex,
}

/// Compiled rules, ordered by rule id for deterministic mining.
#[derive(Debug, Clone, Default)]
pub struct CompiledPatternSet {
    rules: Vec<CompiledRule>,
}

impl CompiledPatternSet {
    pub fn rules(&self) -> &[CompiledRule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Plain-text wordlist: one entry per line, blank lines and `#`
/// comments skipped.
pub fn parse_wordlist(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

/// Rules TSV: `RULE-ID LANG-PAIR CATEGORY FORM SRC-PATTERN TGT-PATTERN`.
pub fn parse_rules(tsv: &str) -> Result<Vec<MiningRule>, BuildError> {
    let text = tsv.strip_prefix('\u{feff}').unwrap_or(tsv);
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(BuildError::BadLine {
        line: 1,
        message: "empty rules file".into(),
    })?;
    let expected = ["RULE-ID", "LANG-PAIR", "CATEGORY", "FORM", "SRC-PATTERN", "TGT-PATTERN"];
    let header_fields: Vec<&str> = header.split('\t').map(str::trim).collect();
    if header_fields != expected {
        return Err(BuildError::BadLine {
            line: 1,
            message: format!("rules header must be {}", expected.join("\\t")),
        });
    }
    let mut rules = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != expected.len() {
            return Err(BuildError::BadLine {
                line: line_no,
                message: format!("expected {} fields, found {}", expected.len(), fields.len()),
            });
        }
        let category = match fields[2].trim() {
            "1" => Category::Cat1,
            "2" => Category::Cat2,
            other => {
                return Err(BuildError::BadLine {
                    line: line_no,
                    message: format!("CATEGORY must be 1 or 2, got '{other}'"),
                })
            }
        };
        let form = match fields[3].trim() {
            "F" | "f" => GenderForm::Feminine,
            "M" | "m" => GenderForm::Masculine,
            other => {
                return Err(BuildError::BadLine {
                    line: line_no,
                    message: format!("FORM must be F or M, got '{other}'"),
                })
            }
        };
        rules.push(MiningRule {
            id: fields[0].trim().to_string(),
            language_pair: fields[1].trim().to_string(),
            category,
            form,
            source_pattern: fields[4].to_string(),
            target_pattern: fields[5].to_string(),
        });
    }
    Ok(rules)
}

fn escaped_alternation(words: &[String]) -> String {
    let escaped: Vec<String> = words.iter().map(|w| regex::escape(w)).collect();
    format!("\\b(?:{})\\b", escaped.join("|"))
}

/// Expand `{OCC}` / `{ADJ_F}` / `{ADJ_M}`. Brace groups in upper case
/// are treated as placeholders so `{2,3}` repetitions pass through.
fn expand_placeholders(
    pattern: &str,
    lists: &WordLists,
    rule_id: &str,
) -> Result<String, BuildError> {
    let placeholder = Regex::new(r"\{([A-Z][A-Z_0-9]*)\}").unwrap();
    let mut out = String::new();
    let mut last = 0;
    for m in placeholder.captures_iter(pattern) {
        let whole = m.get(0).unwrap();
        // `\p{..}` / `\P{..}` are unicode character classes, not
        // placeholders.
        let before = &pattern[..whole.start()];
        if before.ends_with("\\p") || before.ends_with("\\P") {
            out.push_str(&pattern[last..whole.end()]);
            last = whole.end();
            continue;
        }
        let name = &m[1];
        let words = match name {
            "OCC" => &lists.occupations,
            "ADJ_F" => &lists.adjectives_f,
            "ADJ_M" => &lists.adjectives_m,
            _ => {
                return Err(BuildError::UnknownPlaceholder {
                    rule_id: rule_id.to_string(),
                    placeholder: name.to_string(),
                })
            }
        };
        if words.is_empty() {
            return Err(BuildError::EmptyExpansion {
                rule_id: rule_id.to_string(),
                placeholder: name.to_string(),
            });
        }
        if let Some(entry) = words.iter().find(|w| w.chars().any(char::is_whitespace)) {
            return Err(BuildError::MultiwordEntry {
                placeholder: name.to_string(),
                entry: entry.clone(),
            });
        }
        out.push_str(&pattern[last..whole.start()]);
        out.push_str(&escaped_alternation(words));
        last = whole.end();
    }
    out.push_str(&pattern[last..]);
    Ok(out)
}

/// Compile every rule against the wordlists. Rules come out sorted by
/// id; duplicate ids and non-capturing target patterns are rejected.
pub fn compile_patterns(
    rules: &[MiningRule],
    lists: &WordLists,
) -> Result<CompiledPatternSet, BuildError> {
    let mut compiled = Vec::with_capacity(rules.len());
    for rule in rules {
        let source_pattern = expand_placeholders(&rule.source_pattern, lists, &rule.id)?;
        let target_pattern = expand_placeholders(&rule.target_pattern, lists, &rule.id)?;
        let source = Regex::new(&source_pattern).map_err(|e| BuildError::BadPattern {
            rule_id: rule.id.clone(),
            side: "source",
            message: e.to_string(),
        })?;
        let target = Regex::new(&target_pattern).map_err(|e| BuildError::BadPattern {
            rule_id: rule.id.clone(),
            side: "target",
            message: e.to_string(),
        })?;
        if target.captures_len() < 2 {
            return Err(BuildError::NoCaptureGroup {
                rule_id: rule.id.clone(),
            });
        }
        compiled.push(CompiledRule {
            rule: rule.clone(),
            source,
            target,
        });
    }
    compiled.sort_by(|a, b| a.rule.id.cmp(&b.rule.id));
    for pair in compiled.windows(2) {
        if pair[0].rule.id == pair[1].rule.id {
            return Err(BuildError::DuplicateRuleId(pair[0].rule.id.clone()));
        }
    }
    Ok(CompiledPatternSet { rules: compiled })
}
