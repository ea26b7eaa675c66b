//! Assets shipped with the crate: the Italian/French swap lexicon,
//! reconstruction mining rules for en-it and en-fr, and sample
//! wordlists. The occupation list is a sample of the public
//! US Bureau of Labor Statistics occupation table; the adjective lists
//! carry fifty clearly gender-inflected human-referring adjectives per
//! language.

use std::sync::LazyLock;

use crate::builder::{parse_exceptions, parse_rules, parse_suffix_rules, parse_wordlist};
use crate::builder::{MiningRule, SwapLexicon, WordLists};

const EXCEPTIONS_TSV: &str = include_str!("../assets/lexicon/exceptions.tsv");
const SUFFIX_RULES_TSV: &str = include_str!("../assets/lexicon/suffix_rules.tsv");
const RULES_EN_IT: &str = include_str!("../assets/rules/rules.en-it.tsv");
const RULES_EN_FR: &str = include_str!("../assets/rules/rules.en-fr.tsv");
const OCCUPATIONS_EN: &str = include_str!("../assets/wordlists/occupations.en.txt");
const ADJECTIVES_IT_F: &str = include_str!("../assets/wordlists/adjectives.it.f.txt");
const ADJECTIVES_IT_M: &str = include_str!("../assets/wordlists/adjectives.it.m.txt");
const ADJECTIVES_FR_F: &str = include_str!("../assets/wordlists/adjectives.fr.f.txt");
const ADJECTIVES_FR_M: &str = include_str!("../assets/wordlists/adjectives.fr.m.txt");

static LEXICON: LazyLock<SwapLexicon> = LazyLock::new(|| {
    let mut lexicon = SwapLexicon::default();
    parse_exceptions(EXCEPTIONS_TSV, &mut lexicon).expect("shipped exceptions parse");
    parse_suffix_rules(SUFFIX_RULES_TSV, &mut lexicon).expect("shipped suffix rules parse");
    lexicon
});

/// The shipped it/fr swap lexicon.
pub fn lexicon() -> &'static SwapLexicon {
    &LEXICON
}

/// Shipped mining rules for a language pair, if any.
pub fn mining_rules(language_pair: &str) -> Option<Vec<MiningRule>> {
    let tsv = match language_pair {
        "en-it" => RULES_EN_IT,
        "en-fr" => RULES_EN_FR,
        _ => return None,
    };
    Some(parse_rules(tsv).expect("shipped rules parse"))
}

/// Shipped wordlists for a language pair, if any.
pub fn word_lists(language_pair: &str) -> Option<WordLists> {
    let (f, m) = match language_pair {
        "en-it" => (ADJECTIVES_IT_F, ADJECTIVES_IT_M),
        "en-fr" => (ADJECTIVES_FR_F, ADJECTIVES_FR_M),
        _ => return None,
    };
    Some(WordLists {
        occupations: parse_wordlist(OCCUPATIONS_EN),
        adjectives_f: parse_wordlist(f),
        adjectives_m: parse_wordlist(m),
    })
}
