//! Canonical tokenizer, n-gram counting, corpus-level BLEU and the
//! clipped gender-term accuracy primitive.
//!
//! All functions are pure; BLEU is case-sensitive while term accuracy
//! lowercases both sides, so sentence-initial capitalization never
//! breaks a gender-term match.

use std::collections::HashMap;

use unicode_normalization::UnicodeNormalization;

/// Punctuation detached as standalone tokens.
const DETACHED: &[char] = &[
    '.', ',', ';', ':', '!', '?', '"', '(', ')', '[', ']', '«', '»', '…', '—',
];

fn is_elision_apostrophe(c: char) -> bool {
    c == '\'' || c == '’'
}

/// Tokenize NFC-normalized text: whitespace splits, the punctuation set
/// above detaches, an apostrophe after a letter closes its token
/// ("l'une" -> ["l'", "une"]), and hyphens stay inside tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let normalized: String = text.nfc().collect();
    tokenize_spans(&normalized)
        .into_iter()
        .map(|(token, _)| token)
        .collect()
}

/// Tokenization of already-normalized text together with the byte range
/// each token occupies. Tokens are verbatim slices of the input, which
/// is what lets the swapper splice replacements without touching any
/// other byte.
pub(crate) fn tokenize_spans(normalized: &str) -> Vec<(String, std::ops::Range<usize>)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut prev_letter = false;
    let flush = |start: &mut Option<usize>, end: usize, out: &mut Vec<_>| {
        if let Some(s) = start.take() {
            if s < end {
                out.push((normalized[s..end].to_string(), s..end));
            }
        }
    };
    for (i, c) in normalized.char_indices() {
        let next = i + c.len_utf8();
        if c.is_whitespace() {
            flush(&mut start, i, &mut out);
        } else if DETACHED.contains(&c) {
            flush(&mut start, i, &mut out);
            out.push((c.to_string(), i..next));
        } else if is_elision_apostrophe(c) && prev_letter {
            // A letter always opens a token, so `start` is set here.
            flush(&mut start, next, &mut out);
        } else if start.is_none() {
            start = Some(i);
        }
        prev_letter = c.is_alphabetic();
    }
    flush(&mut start, normalized.len(), &mut out);
    out
}

/// Contiguous n-gram windows of `tokens` with multiplicities. Empty
/// when the sequence is shorter than `n`.
///
/// Contract: `n >= 1`.
pub fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    assert!(n >= 1, "ngram_counts requires n >= 1");
    let mut counts: HashMap<&[String], usize> = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus-level BLEU-4 with modified (clipped) precisions and brevity
/// penalty, no smoothing.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BleuScore {
    /// 100 * BP * geometric mean of p1..p4; 0 when any precision is 0.
    pub score: f64,
    /// Modified n-gram precisions p1..p4.
    pub precisions: [f64; 4],
    /// 1 when the hypothesis corpus is longer than the reference corpus,
    /// exp(1 - r/c) otherwise; 0 on empty hypotheses.
    pub brevity_penalty: f64,
    /// Total hypothesis tokens (c).
    pub hyp_length: usize,
    /// Total reference tokens (r).
    pub ref_length: usize,
    /// Set when the input cannot support a meaningful BLEU-4: empty
    /// hypotheses, a zero n-gram denominator, or a zero precision.
    pub degenerate: bool,
}

/// Corpus-level BLEU with a single reference per segment. Per-segment
/// clipping: each hypothesis n-gram counts at most as often as it
/// occurs in that segment's reference.
///
/// Contract: equal, non-zero list lengths.
pub fn corpus_bleu(hypotheses: &[Vec<String>], references: &[Vec<String>]) -> BleuScore {
    assert_eq!(
        hypotheses.len(),
        references.len(),
        "corpus_bleu requires aligned hypothesis/reference lists"
    );
    assert!(!hypotheses.is_empty(), "corpus_bleu requires at least one segment");

    let mut matched = [0usize; 4];
    let mut total = [0usize; 4];
    let mut hyp_length = 0;
    let mut ref_length = 0;
    for (hyp, reference) in hypotheses.iter().zip(references) {
        hyp_length += hyp.len();
        ref_length += reference.len();
        for n in 1..=4usize {
            let hyp_counts = ngram_counts(hyp, n);
            if hyp_counts.is_empty() {
                continue;
            }
            let ref_counts = ngram_counts(reference, n);
            total[n - 1] += hyp.len() - n + 1;
            for (gram, count) in hyp_counts {
                let clip = ref_counts.get(gram).copied().unwrap_or(0);
                matched[n - 1] += count.min(clip);
            }
        }
    }

    let mut precisions = [0.0f64; 4];
    for n in 0..4 {
        if total[n] > 0 {
            precisions[n] = matched[n] as f64 / total[n] as f64;
        }
    }
    let brevity_penalty = if hyp_length == 0 {
        0.0
    } else if hyp_length > ref_length {
        1.0
    } else {
        (1.0 - ref_length as f64 / hyp_length as f64).exp()
    };
    let degenerate =
        hyp_length == 0 || total.contains(&0) || precisions.contains(&0.0);
    let score = if degenerate {
        0.0
    } else {
        let log_sum: f64 = precisions.iter().map(|p| p.ln()).sum();
        100.0 * brevity_penalty * (log_sum / 4.0).exp()
    };
    BleuScore {
        score,
        precisions,
        brevity_penalty,
        hyp_length,
        ref_length,
        degenerate,
    }
}

/// Matched/total counts for gender-term accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct AccuracyScore {
    pub matched: usize,
    pub total: usize,
}

impl AccuracyScore {
    /// matched / total, or `None` when there is nothing to score.
    pub fn value(&self) -> Option<f64> {
        (self.total > 0).then(|| self.matched as f64 / self.total as f64)
    }
}

/// Clipped term matching: with both sides lowercased, each distinct
/// term matches at most `min(times listed, times in hypothesis)`, so
/// over-generated terms are never rewarded.
pub fn term_accuracy(hypothesis: &[String], terms: &[String]) -> AccuracyScore {
    let mut hyp_counts: HashMap<String, usize> = HashMap::new();
    for token in hypothesis {
        *hyp_counts.entry(token.to_lowercase()).or_insert(0) += 1;
    }
    let mut term_counts: HashMap<String, usize> = HashMap::new();
    for term in terms {
        *term_counts.entry(term.to_lowercase()).or_insert(0) += 1;
    }
    let matched = term_counts
        .iter()
        .map(|(term, count)| count.min(hyp_counts.get(term).unwrap_or(&0)))
        .sum();
    AccuracyScore {
        matched,
        total: terms.len(),
    }
}
