//! Candidate mining: a (source, target) pair yields one candidate per
//! rule whose source pattern matches the source AND whose target
//! pattern matches the target. Candidates come out in (pair index,
//! rule id) order, so runs are reproducible.

use super::patterns::CompiledPatternSet;
use super::BuildError;
use crate::corpus::{Category, GenderForm, SpeakerGender};
use crate::metrics::tokenize;

/// One mined sentence pair with the spans the rule marked as
/// gender-marked, as character offsets into `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub pair_index: usize,
    pub talk: Option<String>,
    pub source: String,
    pub target: String,
    pub rule_id: String,
    pub category: Category,
    pub form: GenderForm,
    pub matched_spans: Vec<(usize, usize)>,
    pub speaker: Option<SpeakerGender>,
}

impl Candidate {
    /// Target tokens covered by the matched spans, in span order.
    /// Spans are clamped to the target, so stale offsets in hand-edited
    /// files degrade instead of panicking.
    pub fn term_tokens(&self) -> Vec<String> {
        let chars: Vec<char> = self.target.chars().collect();
        self.matched_spans
            .iter()
            .flat_map(|&(start, end)| {
                let start = start.min(chars.len());
                let end = end.clamp(start, chars.len());
                let span_text: String = chars[start..end].iter().collect();
                tokenize(&span_text)
            })
            .collect()
    }
}

fn byte_to_char_offset(text: &str, byte: usize) -> usize {
    text[..byte].chars().count()
}

/// Run every compiled rule over every pair. Spans collect each
/// participating capture group across all non-overlapping matches of
/// the target pattern; overlapping group spans keep the leftmost.
pub fn mine(pairs: &[(String, String)], patterns: &CompiledPatternSet) -> Vec<Candidate> {
    let mut candidates = Vec::new();
    for (pair_index, (source, target)) in pairs.iter().enumerate() {
        for compiled in patterns.rules() {
            if !compiled.source.is_match(source) {
                continue;
            }
            let mut spans: Vec<(usize, usize)> = Vec::new();
            for captures in compiled.target.captures_iter(target) {
                for group in 1..captures.len() {
                    if let Some(m) = captures.get(group) {
                        if m.start() < m.end() {
                            spans.push((
                                byte_to_char_offset(target, m.start()),
                                byte_to_char_offset(target, m.end()),
                            ));
                        }
                    }
                }
            }
            spans.sort_unstable();
            let mut kept: Vec<(usize, usize)> = Vec::new();
            for span in spans {
                if kept.last().is_none_or(|last| span.0 >= last.1) {
                    kept.push(span);
                }
            }
            if kept.is_empty() {
                continue;
            }
            candidates.push(Candidate {
                pair_index,
                talk: None,
                source: source.clone(),
                target: target.clone(),
                rule_id: compiled.rule.id.clone(),
                category: compiled.rule.category,
                form: compiled.rule.form,
                matched_spans: kept,
                speaker: None,
            });
        }
    }
    candidates
}

const CANDIDATE_HEADER: &str =
    "ID\tTALK\tSRC\tREF-C\tREF-W\tSPEAKER\tFORM\tCATEGORY\tTERMS\tRULE-ID\tSPANS";

/// Candidates TSV: the corpus schema plus RULE-ID and SPANS columns.
/// REF-W is left empty (the swapper fills it) and TERMS holds the
/// span-covered target tokens, semicolon-separated.
pub fn write_candidates(candidates: &[Candidate]) -> String {
    let mut out = String::from(CANDIDATE_HEADER);
    out.push('\n');
    for c in candidates {
        let spans = c
            .matched_spans
            .iter()
            .map(|(s, e)| format!("{s}-{e}"))
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(&format!(
            "p{}-{}\t{}\t{}\t{}\t\t{}\t{}\t{}\t{}\t{}\t{}\n",
            c.pair_index + 1,
            c.rule_id,
            c.talk.as_deref().unwrap_or(""),
            c.source,
            c.target,
            c.speaker.map(|s| s.as_field()).unwrap_or(""),
            c.form.as_field(),
            c.category.as_field(),
            c.term_tokens().join(";"),
            c.rule_id,
            spans
        ));
    }
    out
}

/// Recover the pair index from a canonical `p<n>-<rule>` candidate id.
fn pair_index_from_id(id: &str) -> Option<usize> {
    let digits = id.strip_prefix('p')?.split_once('-')?.0;
    digits.parse::<usize>().ok()?.checked_sub(1)
}

/// Read a candidates TSV back. Pair indices come from the canonical
/// `p<n>-<rule>` ids when present (so ids survive a round trip), and
/// from row order otherwise.
pub fn read_candidates(tsv: &str) -> Result<Vec<Candidate>, BuildError> {
    let text = tsv.strip_prefix('\u{feff}').unwrap_or(tsv);
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(BuildError::BadLine {
        line: 1,
        message: "empty candidates file".into(),
    })?;
    if header.trim_end() != CANDIDATE_HEADER {
        return Err(BuildError::BadLine {
            line: 1,
            message: "candidates header does not match the candidates schema".into(),
        });
    }
    let columns = CANDIDATE_HEADER.split('\t').count();
    let mut candidates = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != columns {
            return Err(BuildError::BadLine {
                line: line_no,
                message: format!("expected {columns} fields, found {}", fields.len()),
            });
        }
        let form = match fields[6].trim() {
            "F" => GenderForm::Feminine,
            "M" => GenderForm::Masculine,
            other => {
                return Err(BuildError::BadLine {
                    line: line_no,
                    message: format!("FORM must be F or M, got '{other}'"),
                })
            }
        };
        let category = match fields[7].trim() {
            "1" => Category::Cat1,
            "2" => Category::Cat2,
            other => {
                return Err(BuildError::BadLine {
                    line: line_no,
                    message: format!("CATEGORY must be 1 or 2, got '{other}'"),
                })
            }
        };
        let speaker = match fields[5].trim() {
            "" => None,
            "F" => Some(SpeakerGender::Female),
            "M" => Some(SpeakerGender::Male),
            other => {
                return Err(BuildError::BadLine {
                    line: line_no,
                    message: format!("SPEAKER must be F, M or empty, got '{other}'"),
                })
            }
        };
        let mut spans = Vec::new();
        for chunk in fields[10].split(';').filter(|c| !c.trim().is_empty()) {
            let (s, e) = chunk.trim().split_once('-').ok_or(BuildError::BadLine {
                line: line_no,
                message: format!("SPANS entry '{chunk}' is not start-end"),
            })?;
            let parse = |v: &str| {
                v.parse::<usize>().map_err(|_| BuildError::BadLine {
                    line: line_no,
                    message: format!("SPANS entry '{chunk}' is not start-end"),
                })
            };
            let (start, end) = (parse(s)?, parse(e)?);
            if start >= end {
                return Err(BuildError::BadLine {
                    line: line_no,
                    message: format!("SPANS entry '{chunk}' is empty or reversed"),
                });
            }
            spans.push((start, end));
        }
        candidates.push(Candidate {
            pair_index: pair_index_from_id(fields[0].trim()).unwrap_or(candidates.len()),
            talk: match fields[1].trim() {
                "" => None,
                talk => Some(talk.to_string()),
            },
            source: fields[2].to_string(),
            target: fields[3].to_string(),
            rule_id: fields[9].trim().to_string(),
            category,
            form,
            matched_spans: spans,
            speaker,
        });
    }
    Ok(candidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::patterns::{compile_patterns, MiningRule, WordLists};

    fn pattern_set() -> CompiledPatternSet {
        let rules = vec![
            MiningRule {
                id: "it-c1-f-part".into(),
                language_pair: "en-it".into(),
                category: Category::Cat1,
                form: GenderForm::Feminine,
                source_pattern: r"(?i)\bI (was|am|have been)\b".into(),
                target_pattern: r"\b[Ss]ono (\p{L}+ta)\b".into(),
            },
            MiningRule {
                id: "it-c2-f-pron".into(),
                language_pair: "en-it".into(),
                category: Category::Cat2,
                form: GenderForm::Feminine,
                source_pattern: r"(?i)\bshe\b".into(),
                target_pattern: r"\b(?:[Ll]a|[Uu]na) (\p{L}+a)\b".into(),
            },
        ];
        compile_patterns(&rules, &WordLists::default()).unwrap()
    }

    fn pair(src: &str, tgt: &str) -> (String, String) {
        (src.to_string(), tgt.to_string())
    }

    #[test]
    fn first_person_feminine_participle_is_mined() {
        let pairs = vec![pair("I was born in Rome", "Sono nata a Roma")];
        let found = mine(&pairs, &pattern_set());
        assert_eq!(found.len(), 1);
        let c = &found[0];
        assert_eq!(c.rule_id, "it-c1-f-part");
        assert_eq!(c.category, Category::Cat1);
        assert_eq!(c.form, GenderForm::Feminine);
        assert_eq!(c.matched_spans, vec![(5, 9)]);
        assert_eq!(c.term_tokens(), vec!["nata".to_string()]);
    }

    #[test]
    fn content_cued_feminine_phrase_is_mined() {
        let pairs = vec![pair("She was a teacher", "Era una maestra brava")];
        let found = mine(&pairs, &pattern_set());
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].rule_id, "it-c2-f-pron");
        assert_eq!(found[0].category, Category::Cat2);
        assert_eq!(found[0].term_tokens(), vec!["maestra".to_string()]);
    }

    #[test]
    fn source_only_match_yields_nothing() {
        let pairs = vec![pair("I was busy", "Nessun participio qui")];
        assert!(mine(&pairs, &pattern_set()).is_empty());
    }

    #[test]
    fn candidates_come_out_in_pair_then_rule_order() {
        let pairs = vec![
            pair("She said I was tired", "La zia disse : sono stancata"),
            pair("I was born here", "Sono nata qui"),
        ];
        let found = mine(&pairs, &pattern_set());
        let keys: Vec<(usize, &str)> = found
            .iter()
            .map(|c| (c.pair_index, c.rule_id.as_str()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn every_candidate_rematches_its_rule() {
        let set = pattern_set();
        let pairs = vec![
            pair("I was born in Rome", "Sono nata a Roma"),
            pair("She was kind", "Era una persona cara"),
        ];
        for c in mine(&pairs, &set) {
            let rule = set
                .rules()
                .iter()
                .find(|r| r.rule.id == c.rule_id)
                .expect("rule exists");
            assert!(rule.source.is_match(&c.source));
            assert!(rule.target.is_match(&c.target));
        }
    }

    #[test]
    fn spans_use_character_offsets() {
        // Accented chars before the capture shift byte offsets but not
        // char offsets.
        let rules = vec![MiningRule {
            id: "fr".into(),
            language_pair: "en-fr".into(),
            category: Category::Cat1,
            form: GenderForm::Feminine,
            source_pattern: r"born".into(),
            target_pattern: r"suis (\p{L}+)".into(),
        }];
        let set = compile_patterns(&rules, &WordLists::default()).unwrap();
        let pairs = vec![pair("born", "héé suis née ici")];
        let found = mine(&pairs, &set);
        assert_eq!(found[0].matched_spans, vec![(9, 12)]);
        assert_eq!(found[0].term_tokens(), vec!["née".to_string()]);
    }

    #[test]
    fn candidates_tsv_round_trip() {
        let pairs = vec![pair("I was born in Rome", "Sono nata a Roma")];
        let mut found = mine(&pairs, &pattern_set());
        found[0].talk = Some("talk9".into());
        found[0].speaker = Some(SpeakerGender::Female);
        let text = write_candidates(&found);
        let back = read_candidates(&text).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].talk.as_deref(), Some("talk9"));
        assert_eq!(back[0].speaker, Some(SpeakerGender::Female));
        assert_eq!(back[0].matched_spans, found[0].matched_spans);
        assert_eq!(back[0].term_tokens(), vec!["nata".to_string()]);
    }
}
