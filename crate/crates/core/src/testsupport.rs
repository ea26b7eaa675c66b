//! Brute-force oracles and fixture generators used by the test suites.
//!
//! Everything here is deliberately naive and independent of the main
//! implementation paths: the BLEU oracle enumerates n-grams with nested
//! loops over joined strings, and the accuracy oracle walks the token
//! bags pairwise. Gated behind the `testsupport` feature so it never
//! ships in a normal build.

use rand::Rng;

use crate::corpus::{Category, Corpus, GenderForm, GenderTermPair, SpeakerGender, TripletRecord};

/// BLEU figures computed by the brute-force route.
#[derive(Debug, Clone, Copy)]
pub struct OracleBleu {
    pub score: f64,
    pub precisions: [f64; 4],
    pub brevity_penalty: f64,
    pub hyp_length: usize,
    pub ref_length: usize,
}

fn join_gram(tokens: &[String], start: usize, n: usize) -> String {
    tokens[start..start + n].join("\u{1}")
}

fn count_gram(tokens: &[String], gram: &str, n: usize) -> usize {
    if tokens.len() < n {
        return 0;
    }
    let mut count = 0;
    for start in 0..=tokens.len() - n {
        if join_gram(tokens, start, n) == gram {
            count += 1;
        }
    }
    count
}

/// Corpus BLEU-4 by naive per-segment n-gram enumeration: for every
/// distinct hypothesis n-gram, clip its count against the reference,
/// then pool counts over segments. Geometric mean via `powf`, not via
/// a log sum, so the arithmetic route differs from the implementation.
pub fn bleu_oracle(hypotheses: &[Vec<String>], references: &[Vec<String>]) -> OracleBleu {
    assert_eq!(hypotheses.len(), references.len());
    let mut matched = [0usize; 4];
    let mut total = [0usize; 4];
    let mut hyp_length = 0;
    let mut ref_length = 0;
    for (hyp, re) in hypotheses.iter().zip(references) {
        hyp_length += hyp.len();
        ref_length += re.len();
        for n in 1..=4usize {
            if hyp.len() < n {
                continue;
            }
            let mut seen: Vec<String> = Vec::new();
            for start in 0..=hyp.len() - n {
                let gram = join_gram(hyp, start, n);
                if seen.contains(&gram) {
                    continue;
                }
                let in_hyp = count_gram(hyp, &gram, n);
                let in_ref = count_gram(re, &gram, n);
                matched[n - 1] += in_hyp.min(in_ref);
                seen.push(gram);
            }
            total[n - 1] += hyp.len() - n + 1;
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
    let degenerate = hyp_length == 0 || total.contains(&0);
    let score = if degenerate || precisions.contains(&0.0) {
        0.0
    } else {
        let product: f64 = precisions.iter().product();
        100.0 * brevity_penalty * product.powf(0.25)
    };
    OracleBleu {
        score,
        precisions,
        brevity_penalty,
        hyp_length,
        ref_length,
    }
}

/// Size of the multiset intersection of two token bags, lowercased,
/// by pairwise matching with used-flags.
pub fn multiset_match_count(needles: &[String], haystack: &[String]) -> usize {
    let needles: Vec<String> = needles.iter().map(|t| t.to_lowercase()).collect();
    let haystack: Vec<String> = haystack.iter().map(|t| t.to_lowercase()).collect();
    let mut used = vec![false; haystack.len()];
    let mut matched = 0;
    for needle in &needles {
        for (i, hay) in haystack.iter().enumerate() {
            if !used[i] && hay == needle {
                used[i] = true;
                matched += 1;
                break;
            }
        }
    }
    matched
}

/// Random token sequences over a small vocabulary, for oracle
/// cross-checks. Lengths are in `1..=max_tokens`.
pub fn random_segment<R: Rng>(rng: &mut R, max_tokens: usize, vocab: &[&str]) -> Vec<String> {
    let len = rng.gen_range(1..=max_tokens);
    (0..len)
        .map(|_| vocab[rng.gen_range(0..vocab.len())].to_string())
        .collect()
}

/// A randomized (hypotheses, references) corpus of up to `max_segments`
/// segments with up to `max_tokens` tokens each.
pub fn random_bleu_corpus<R: Rng>(
    rng: &mut R,
    max_segments: usize,
    max_tokens: usize,
) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
    const VOCAB: &[&str] = &["a", "b", "c", "d", "e", "f"];
    let segments = rng.gen_range(1..=max_segments);
    let mut hyps = Vec::with_capacity(segments);
    let mut refs = Vec::with_capacity(segments);
    for _ in 0..segments {
        hyps.push(random_segment(rng, max_tokens, VOCAB));
        refs.push(random_segment(rng, max_tokens, VOCAB));
    }
    (hyps, refs)
}

/// The four-record fixture used across the suites: one record per
/// (category, form) cell, references at least four tokens long, and
/// correct/wrong forms disjoint within every record.
pub fn fixture_corpus() -> Corpus {
    crate::corpus::parse_corpus(FIXTURE_TSV, "en-it").expect("fixture corpus parses")
}

/// The fixture in its canonical TSV form.
pub const FIXTURE_TSV: &str = "\
ID\tTALK\tSRC\tREF-C\tREF-W\tSPEAKER\tFORM\tCATEGORY\tTERMS
t1-1\tt1\tI was born and brought up in Mumbai.\tSono nata e cresciuta a Mumbai.\tSono nato e cresciuto a Mumbai.\tF\tF\t1\tnata:nato;cresciuta:cresciuto
t1-2\tt1\tI myself was one of them.\tIo stesso ero uno di loro.\tIo stessa ero una di loro.\tM\tM\t1\tstesso:stessa;uno:una
t2-1\tt2\tShe was a great innovator.\tEra una grande innovatrice davvero.\tEra uno grande innovatore davvero.\tM\tF\t2\tuna:uno;innovatrice:innovatore
t2-2\tt2\tMy father was a famous painter.\tMio padre era un pittore famoso.\tMio padre era un pittrice famosa.\tF\tM\t2\tpittore:pittrice;famoso:famosa
";

/// Deterministic vocabulary pools with globally disjoint correct and
/// wrong forms: correct forms end in `-ka`, wrong forms in `-ko`, and
/// filler tokens carry no gender marking at all.
fn synth_correct_form(i: usize) -> String {
    format!("mirka{i}")
}

fn synth_wrong_form(i: usize) -> String {
    format!("mirko{i}")
}

fn synth_filler(i: usize) -> String {
    format!("w{i}")
}

/// A randomized but always-valid corpus: every record gets 4..=9 filler
/// tokens, 1..=3 gender term pairs drawn from the disjoint pools, a
/// random cell and speaker. Record text ends with a detached period so
/// references are comfortably long for 4-gram BLEU.
pub fn random_valid_corpus<R: Rng>(rng: &mut R, n_records: usize) -> Corpus {
    let mut records = Vec::with_capacity(n_records);
    let mut next_form = 0usize;
    for idx in 0..n_records {
        let n_terms = rng.gen_range(1..=3);
        let n_filler = rng.gen_range(4..=9);
        let mut pairs = Vec::with_capacity(n_terms);
        for _ in 0..n_terms {
            pairs.push((synth_correct_form(next_form), synth_wrong_form(next_form)));
            next_form += 1;
        }
        let mut correct_tokens: Vec<String> = (0..n_filler).map(synth_filler).collect();
        let mut wrong_tokens = correct_tokens.clone();
        for (c, w) in &pairs {
            let pos = rng.gen_range(0..=correct_tokens.len());
            correct_tokens.insert(pos, c.clone());
            wrong_tokens.insert(pos, w.clone());
        }
        let category = if rng.gen() { Category::Cat1 } else { Category::Cat2 };
        let form = if rng.gen() {
            GenderForm::Feminine
        } else {
            GenderForm::Masculine
        };
        let speaker = if rng.gen() {
            SpeakerGender::Female
        } else {
            SpeakerGender::Male
        };
        records.push(TripletRecord {
            id: format!("synth-{idx}"),
            talk: format!("talk{}", idx / 5),
            source: format!("source sentence {idx}"),
            ref_correct: format!("{} .", correct_tokens.join(" ")),
            ref_wrong: format!("{} .", wrong_tokens.join(" ")),
            speaker,
            form,
            category,
            terms: pairs
                .into_iter()
                .map(|(c, w)| GenderTermPair {
                    correct_form: c,
                    wrong_form: w,
                })
                .collect(),
        });
    }
    Corpus::from_records("en-xx", records).expect("generated corpus is non-empty")
}

/// Plausible hypothesis lines for a corpus: each line is the correct
/// reference with some tokens randomly replaced by fillers or by the
/// record's wrong forms, so both metric sides see partial matches.
pub fn random_hypotheses<R: Rng>(rng: &mut R, corpus: &Corpus) -> Vec<String> {
    corpus
        .records()
        .iter()
        .map(|record| {
            let mut tokens: Vec<String> = record
                .ref_correct
                .split_whitespace()
                .map(str::to_string)
                .collect();
            for token in tokens.iter_mut() {
                let roll: f64 = rng.gen();
                if roll < 0.2 {
                    *token = synth_filler(rng.gen_range(0..12));
                } else if roll < 0.4 {
                    if let Some(pair) = record
                        .terms
                        .iter()
                        .find(|p| p.correct_form.eq_ignore_ascii_case(token))
                    {
                        *token = pair.wrong_form.clone();
                    }
                }
            }
            tokens.join(" ")
        })
        .collect()
}
