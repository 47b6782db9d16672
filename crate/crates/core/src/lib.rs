//! Reproducible evaluation of chunk-extraction sequence labeling.
//!
//! The crate reads CoNLL-style label files ([`conll`]), checks them against a
//! declared chunk encoding ([`labels`], [`validate`]), repairs invalid label
//! sequences with an explicitly named method ([`repair`]), converts between
//! encodings at the mention level ([`convert`]), scores predictions against a
//! reference with exact-match chunk F1 ([`score`]) and aggregates and compares
//! groups of runs ([`stats`]).
//!
//! Nothing is repaired implicitly. Decoding an invalid sequence is an error;
//! callers that want a repair must ask for one by name.

pub mod chunks;
pub mod cli;
pub mod conll;
pub mod convert;
mod error;
pub mod labels;
pub mod repair;
pub mod score;
pub mod stats;
pub mod validate;

pub use chunks::{decode, encode, Chunk};
pub use conll::{parse_corpus, write_corpus, Corpus, Document, Sentence, TokenRow};
pub use convert::convert_corpus;
pub use error::{Error, Result};
pub use labels::{parse_label, transition_valid, Label, Prefix, Scheme};
pub use repair::{repair_corpus, repair_sequence, RepairMethod, RepairRecord};
pub use score::{count_repairs, score_pair, ScoreOptions, ScoreReport, TypeCounts};
pub use stats::{
    compare_groups, rank_sum_test, summarize_runs, ComparisonReport, RankSumResult, RunSummary,
};
pub use validate::{format_report, validate_corpus, TransitionErrorRecord, ValidationReport};
