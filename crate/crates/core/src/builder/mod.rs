//! Corpus construction: agreement-rule patterns compiled against
//! wordlists, candidate mining over parallel text, balanced sampling,
//! and morphological gender swapping of references.

mod mine;
mod patterns;
mod sample;
mod swap;

pub use mine::{mine, read_candidates, write_candidates, Candidate};
pub use patterns::{
    compile_patterns, parse_rules, parse_wordlist, CompiledPatternSet, MiningRule, WordLists,
};
pub use sample::{balance_sample, BalanceOutcome, Quota, Shortfall};
pub use swap::{
    parse_exceptions, parse_suffix_rules, swap_token, swap_terms, LanguageLexicon, SuffixRule,
    SwapLexicon,
};

use thiserror::Error;

/// Errors from rule compilation, lexicon loading and swapping.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("rule {rule_id}: unknown placeholder {{{placeholder}}}")]
    UnknownPlaceholder { rule_id: String, placeholder: String },
    #[error("rule {rule_id}: placeholder {{{placeholder}}} expands to an empty word list")]
    EmptyExpansion { rule_id: String, placeholder: String },
    #[error("placeholder {{{placeholder}}}: entry '{entry}' is not a single word")]
    MultiwordEntry { placeholder: String, entry: String },
    #[error("rule {rule_id}: {side} pattern does not compile: {message}")]
    BadPattern {
        rule_id: String,
        side: &'static str,
        message: String,
    },
    #[error("rule {rule_id}: target pattern has no capturing group")]
    NoCaptureGroup { rule_id: String },
    #[error("duplicate rule id '{0}'")]
    DuplicateRuleId(String),
    #[error("line {line}: {message}")]
    BadLine { line: usize, message: String },
    #[error("lexicon: {0}")]
    BadLexicon(String),
    #[error("no swap rule for token '{0}'")]
    NoRule(String),
    #[error("no swap rule for tokens: {}", .0.join(", "))]
    NoRules(Vec<String>),
    #[error("term '{0}' not found in the reference")]
    TermNotFound(String),
}
