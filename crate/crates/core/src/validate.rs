//! Corpus validation against a declared encoding scheme.

use std::collections::BTreeSet;
use std::fmt;

use crate::conll::{Corpus, DOCSTART};
use crate::error::{Error, Result};
use crate::labels::{invalid_transitions, parse_label, Label, Scheme};

/// One invalid transition with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionErrorRecord {
    /// Previous label, or `start`.
    pub previous: String,
    /// Current label, or `end` for a chunk left open at the sentence end.
    pub current: String,
    pub token: String,
    pub line: usize,
}

impl fmt::Display for TransitionErrorRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Invalid transition {} -> {} for token '{}' on line {}",
            self.previous, self.current, self.token, self.line
        )
    }
}

/// A `-DOCSTART-` marker row carrying a label other than `O`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocstartWarning {
    pub label: String,
    pub line: usize,
}

impl fmt::Display for DocstartWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Warning: {DOCSTART} marker on line {} has label {} instead of O",
            self.line, self.label
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub source_name: String,
    pub errors: Vec<TransitionErrorRecord>,
    pub warnings: Vec<DocstartWarning>,
    pub token_count: usize,
    pub sequence_count: usize,
    pub document_count: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    /// Number of distinct tokens that are the current token of some invalid
    /// transition.
    pub fn error_token_count(&self) -> usize {
        self.errors
            .iter()
            .map(|e| e.line)
            .collect::<BTreeSet<_>>()
            .len()
    }
}

/// Parses every label of `corpus`, one list per sentence. Errors carry the
/// line number of the offending row.
pub fn parse_corpus_labels(corpus: &Corpus, scheme: Scheme) -> Result<Vec<Vec<Label>>> {
    corpus
        .sentences()
        .map(|sentence| {
            sentence
                .rows()
                .iter()
                .map(|row| {
                    parse_label(row.label(), scheme).map_err(|err| match err {
                        Error::LabelFormat { raw, reason, .. } => Error::LabelFormat {
                            raw,
                            line: Some(row.line()),
                            reason: format!("{reason} (in {})", corpus.source_name()),
                        },
                        other => other,
                    })
                })
                .collect()
        })
        .collect()
}

/// Validates pre-parsed labels (one list per sentence of `corpus`).
pub fn validate_labels(corpus: &Corpus, labels: &[Vec<Label>], scheme: Scheme) -> ValidationReport {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    for (sentence, sentence_labels) in corpus.sentences().zip(labels) {
        if sentence.is_docstart() {
            let label = &sentence_labels[0];
            if !label.is_outside() {
                warnings.push(DocstartWarning {
                    label: label.to_string(),
                    line: sentence.rows()[0].line(),
                });
            }
            continue;
        }
        for bad in invalid_transitions(sentence_labels, scheme) {
            // A dangling chunk at the sentence end is attributed to the last token.
            let row = &sentence.rows()[bad.index.min(sentence.len() - 1)];
            errors.push(TransitionErrorRecord {
                previous: bad.previous_str(),
                current: bad.current_str(),
                token: row.token().to_string(),
                line: row.line(),
            });
        }
    }
    ValidationReport {
        source_name: corpus.source_name().to_string(),
        errors,
        warnings,
        token_count: corpus.token_count(),
        sequence_count: corpus.sentence_count(),
        document_count: corpus.document_count(),
    }
}

/// Reports every invalid transition of `corpus` under `scheme`, in file order.
///
/// Fails only when a label does not parse under the scheme.
pub fn validate_corpus(corpus: &Corpus, scheme: Scheme) -> Result<ValidationReport> {
    let labels = parse_corpus_labels(corpus, scheme)?;
    Ok(validate_labels(corpus, &labels, scheme))
}

/// Console form of a report: a summary line followed by one line per error.
pub fn format_report(report: &ValidationReport) -> String {
    let mut out = format!(
        "Encountered {} errors in {} tokens, {} sequences, and {} documents in {}\n",
        report.errors.len(),
        report.error_token_count(),
        report.sequence_count,
        report.document_count,
        report.source_name
    );
    for record in &report.errors {
        out.push_str(&record.to_string());
        out.push('\n');
    }
    out
}
