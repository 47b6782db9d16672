//! Named repair methods for invalid BIO and IOB1 label sequences.
//!
//! * `begin` turns an unexpected chunk-continuing label into a chunk start
//!   (the conlleval behavior).
//! * `discard` drops the tokens started by an invalid transition.
//! * `stanza` approximates Stanza's internal scorer for BIO: an `I-` run
//!   entered from outside is dropped, and a `B-`/`I-` run whose types
//!   disagree is kept as one chunk typed by its last token. When a run has
//!   both problems the drop wins. This rule is reconstructed from observed
//!   output rather than from Stanza's code.
//! * `none` changes nothing and rejects invalid input.
//!
//! Every repair works sentence by sentence and reports each changed token.

use std::fmt;
use std::str::FromStr;

use crate::conll::Corpus;
use crate::error::{Error, Result};
use crate::labels::{first_invalid, is_valid_sequence, Label, Prefix, Scheme};
use crate::validate::{parse_corpus_labels, validate_labels};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepairMethod {
    Begin,
    Discard,
    Stanza,
    None,
}

impl RepairMethod {
    pub const ALL: [RepairMethod; 4] = [
        RepairMethod::Begin,
        RepairMethod::Discard,
        RepairMethod::Stanza,
        RepairMethod::None,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RepairMethod::Begin => "begin",
            RepairMethod::Discard => "discard",
            RepairMethod::Stanza => "stanza",
            RepairMethod::None => "none",
        }
    }
}

impl fmt::Display for RepairMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RepairMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RepairMethod::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Contract(format!("unknown repair method '{s}'")))
    }
}

/// One changed token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairRecord {
    /// Sentence index within the corpus (0 for [`repair_sequence`]).
    pub sentence: usize,
    pub token: usize,
    pub original: Label,
    pub repaired: Label,
}

/// Repairs one sentence.
///
/// Valid input is returned unchanged under every method and scheme. Invalid
/// input is rejected under `none`, and under any scheme other than BIO and
/// IOB1.
pub fn repair_sequence(
    labels: &[Label],
    scheme: Scheme,
    method: RepairMethod,
) -> Result<(Vec<Label>, Vec<RepairRecord>)> {
    let Some(bad) = first_invalid(labels, scheme) else {
        return Ok((labels.to_vec(), Vec::new()));
    };
    let repaired = match (scheme, method) {
        (_, RepairMethod::None) => {
            return Err(Error::InvalidTransition {
                index: bad.index,
                previous: bad.previous_str(),
                current: bad.current_str(),
            })
        }
        (Scheme::BIO, RepairMethod::Begin) => bio_begin(labels),
        (Scheme::BIO, RepairMethod::Discard) => bio_discard(labels),
        (Scheme::BIO, RepairMethod::Stanza) => bio_stanza(labels),
        (Scheme::IOB1, RepairMethod::Begin) => iob1_begin(labels),
        (Scheme::IOB1, RepairMethod::Discard) => iob1_discard(labels),
        _ => return Err(Error::UnsupportedRepair { scheme, method }),
    };
    debug_assert!(is_valid_sequence(&repaired, scheme));

    let records = labels
        .iter()
        .zip(&repaired)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(token, (a, b))| RepairRecord {
            sentence: 0,
            token,
            original: a.clone(),
            repaired: b.clone(),
        })
        .collect();
    Ok((repaired, records))
}

fn continues(prev: Option<&Label>, label: &Label) -> bool {
    prev.is_some_and(|p| {
        matches!(p.prefix(), Prefix::B | Prefix::I) && p.entity_type() == label.entity_type()
    })
}

fn bio_begin(labels: &[Label]) -> Vec<Label> {
    let mut out: Vec<Label> = Vec::with_capacity(labels.len());
    for label in labels {
        let fixed = if label.prefix() == Prefix::I && !continues(out.last(), label) {
            label.with_prefix(Prefix::B)
        } else {
            label.clone()
        };
        out.push(fixed);
    }
    out
}

fn bio_discard(labels: &[Label]) -> Vec<Label> {
    let mut out: Vec<Label> = Vec::with_capacity(labels.len());
    for label in labels {
        // An I- after a discarded token sees O and is dropped too.
        let fixed = if label.prefix() == Prefix::I && !continues(out.last(), label) {
            Label::outside()
        } else {
            label.clone()
        };
        out.push(fixed);
    }
    out
}

fn bio_stanza(labels: &[Label]) -> Vec<Label> {
    let mut out = labels.to_vec();
    let mut i = 0;
    while i < labels.len() {
        if labels[i].is_outside() {
            i += 1;
            continue;
        }
        let start = i;
        let mut end = i + 1;
        while end < labels.len() && labels[end].prefix() == Prefix::I {
            end += 1;
        }
        let run = &labels[start..end];
        if run[0].prefix() == Prefix::I {
            out[start..end].fill(Label::outside());
        } else if run.iter().any(|l| l.entity_type() != run[0].entity_type()) {
            let last_type = run[run.len() - 1].entity_type().expect("typed label");
            for (slot, label) in out[start..end].iter_mut().zip(run) {
                *slot = label.with_type(last_type);
            }
        }
        i = end;
    }
    out
}

fn iob1_begin(labels: &[Label]) -> Vec<Label> {
    let mut out: Vec<Label> = Vec::with_capacity(labels.len());
    for label in labels {
        let fixed = if label.prefix() == Prefix::B && !continues(out.last(), label) {
            label.with_prefix(Prefix::I)
        } else {
            label.clone()
        };
        out.push(fixed);
    }
    out
}

fn iob1_discard(labels: &[Label]) -> Vec<Label> {
    let mut out: Vec<Label> = Vec::with_capacity(labels.len());
    let mut dropping: Option<&str> = None;
    for label in labels {
        if label.prefix() == Prefix::I && dropping.is_some() && dropping == label.entity_type() {
            out.push(Label::outside());
            continue;
        }
        dropping = None;
        if label.prefix() == Prefix::B && !continues(out.last(), label) {
            dropping = label.entity_type();
            out.push(Label::outside());
        } else {
            out.push(label.clone());
        }
    }
    out
}

/// Result of repairing a whole corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusRepair {
    /// Repaired labels, one list per sentence in corpus order.
    pub labels: Vec<Vec<Label>>,
    pub records: Vec<RepairRecord>,
}

impl CorpusRepair {
    pub fn flat_labels(&self) -> Vec<String> {
        self.labels.iter().flatten().map(Label::to_string).collect()
    }
}

/// Repairs already-parsed per-sentence labels of `corpus`.
pub fn repair_labels(
    corpus: &Corpus,
    labels: &[Vec<Label>],
    scheme: Scheme,
    method: RepairMethod,
) -> Result<CorpusRepair> {
    if method == RepairMethod::None {
        let report = validate_labels(corpus, labels, scheme);
        if !report.errors.is_empty() {
            return Err(Error::InvalidLabels {
                source_name: corpus.source_name().to_string(),
                records: report.errors,
                hint: "repair method 'none' requires valid labels",
            });
        }
        return Ok(CorpusRepair {
            labels: labels.to_vec(),
            records: Vec::new(),
        });
    }

    let mut out = CorpusRepair {
        labels: Vec::with_capacity(labels.len()),
        records: Vec::new(),
    };
    for (index, (sentence, sentence_labels)) in corpus.sentences().zip(labels).enumerate() {
        if sentence.is_docstart() {
            out.labels.push(sentence_labels.clone());
            continue;
        }
        let (fixed, records) = repair_sequence(sentence_labels, scheme, method)?;
        out.labels.push(fixed);
        out.records
            .extend(records.into_iter().map(|r| RepairRecord {
                sentence: index,
                ..r
            }));
    }
    Ok(out)
}

/// Parses the labels of `corpus` under `scheme` and repairs them.
pub fn repair_corpus(
    corpus: &Corpus,
    scheme: Scheme,
    method: RepairMethod,
) -> Result<CorpusRepair> {
    let labels = parse_corpus_labels(corpus, scheme)?;
    repair_labels(corpus, &labels, scheme, method)
}
