use std::path::PathBuf;

use thiserror::Error;

use crate::labels::Scheme;
use crate::repair::RepairMethod;
use crate::validate::TransitionErrorRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}: invalid UTF-8 at byte offset {offset}")]
    Encoding { source_name: String, offset: usize },

    #[error("{source_name}: line {line}: {message}")]
    Format {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("invalid label '{raw}'{}: {reason}", line_suffix(*.line))]
    LabelFormat {
        raw: String,
        line: Option<usize>,
        reason: String,
    },

    #[error("invalid transition {previous} -> {current} at token {index}")]
    InvalidTransition {
        index: usize,
        previous: String,
        current: String,
    },

    #[error("{}", describe_invalid(source_name, records, hint))]
    InvalidLabels {
        source_name: String,
        records: Vec<TransitionErrorRecord>,
        hint: &'static str,
    },

    #[error("repair method '{method}' is not supported for {scheme} labels; repair is only available for BIO and IOB1")]
    UnsupportedRepair {
        scheme: Scheme,
        method: RepairMethod,
    },

    #[error("label count mismatch: expected {expected} labels, got {actual}")]
    LabelCount { expected: usize, actual: usize },

    #[error("invalid chunk list: {0}")]
    ChunkContract(String),

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("token mismatch: reference token '{reference}' on line {reference_line} vs predicted token '{prediction}' on line {prediction_line}")]
    TokenMismatch {
        reference: String,
        reference_line: usize,
        prediction: String,
        prediction_line: usize,
    },

    #[error("{0}")]
    Contract(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors that mean "the labels are invalid", as opposed to
    /// usage, format or I/O problems.
    pub fn is_validity(&self) -> bool {
        matches!(
            self,
            Error::InvalidTransition { .. } | Error::InvalidLabels { .. }
        )
    }
}

fn line_suffix(line: Option<usize>) -> String {
    match line {
        Some(n) => format!(" on line {n}"),
        None => String::new(),
    }
}

fn describe_invalid(source_name: &str, records: &[TransitionErrorRecord], hint: &str) -> String {
    let mut out = format!("{} invalid transitions in {}", records.len(), source_name);
    for record in records {
        out.push('\n');
        out.push_str(&record.to_string());
    }
    if !hint.is_empty() {
        out.push('\n');
        out.push_str(hint);
    }
    out
}
