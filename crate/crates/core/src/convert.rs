//! Conversion between encoding schemes at the mention level.

use crate::chunks::{decode, encode};
use crate::conll::Corpus;
use crate::error::{Error, Result};
use crate::labels::{Label, Scheme};
use crate::validate::{parse_corpus_labels, validate_labels};

pub(crate) const REPAIR_HINT: &str =
    "conversion requires valid input; run the repair subcommand first (repair is available for BIO and IOB1)";

/// Converts every sentence by decoding chunks under `from` and re-encoding
/// them under `to`. Returns one label per token in corpus order.
///
/// Any invalid transition fails the whole conversion. `-DOCSTART-` marker
/// rows keep their label.
pub fn convert_corpus(corpus: &Corpus, from: Scheme, to: Scheme) -> Result<Vec<String>> {
    let labels = parse_corpus_labels(corpus, from)?;
    let report = validate_labels(corpus, &labels, from);
    if !report.is_valid() {
        return Err(Error::InvalidLabels {
            source_name: corpus.source_name().to_string(),
            records: report.errors,
            hint: REPAIR_HINT,
        });
    }

    let mut out = Vec::with_capacity(corpus.token_count());
    for (sentence, sentence_labels) in corpus.sentences().zip(&labels) {
        if sentence.is_docstart() {
            out.push(sentence.rows()[0].label().to_string());
            continue;
        }
        out.extend(
            convert_sequence(sentence_labels, from, to)?
                .iter()
                .map(Label::to_string),
        );
    }
    Ok(out)
}

/// Converts one valid sequence.
pub fn convert_sequence(labels: &[Label], from: Scheme, to: Scheme) -> Result<Vec<Label>> {
    let chunks = decode(labels, from)?;
    encode(&chunks, labels.len(), to)
}
