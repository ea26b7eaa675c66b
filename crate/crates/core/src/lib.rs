//! Toolkit for building and scoring dual-reference gender evaluation
//! corpora for (speech) translation output.
//!
//! Every segment carries a correct reference and a wrong reference that
//! differ only in the morphological marking of gender; scoring the same
//! hypotheses against both sets turns BLEU and term accuracy into
//! signals about gender handling instead of overall quality. The crate
//! provides:
//!
//! - [`corpus`]: the annotated-corpus data model, TSV format,
//!   validation, statistics and filtered views;
//! - [`metrics`]: the canonical tokenizer, corpus BLEU and the clipped
//!   term-accuracy primitive;
//! - [`eval`]: the dual-reference protocol and report rendering;
//! - [`builder`]: pattern mining, balanced sampling and morphological
//!   gender swapping for constructing new test sets;
//! - [`builtin`]: the shipped it/fr lexicon, rules and wordlists.

pub mod builder;
pub mod builtin;
pub mod corpus;
pub mod eval;
pub mod metrics;

#[cfg(any(test, feature = "testsupport"))]
pub mod testsupport;
