//! Exact-match chunk scoring.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::chunks::{decode, Chunk};
use crate::conll::{Corpus, Sentence};
use crate::error::{Error, Result};
use crate::labels::Scheme;
use crate::repair::{repair_labels, RepairMethod};
use crate::validate::{parse_corpus_labels, validate_labels};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeCounts {
    pub entity_type: String,
    pub reference: usize,
    pub predicted: usize,
    pub true_positives: usize,
}

impl TypeCounts {
    fn new(entity_type: impl Into<String>) -> Self {
        TypeCounts {
            entity_type: entity_type.into(),
            reference: 0,
            predicted: 0,
            true_positives: 0,
        }
    }

    pub fn false_positives(&self) -> usize {
        self.predicted - self.true_positives
    }

    pub fn false_negatives(&self) -> usize {
        self.reference - self.true_positives
    }

    pub fn precision(&self) -> f64 {
        ratio(self.true_positives, self.predicted)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.true_positives, self.reference)
    }

    /// Harmonic mean of precision and recall, written as `2TP / (pred + ref)`.
    pub fn f1(&self) -> f64 {
        ratio(2 * self.true_positives, self.predicted + self.reference)
    }

    pub fn precision_percent(&self) -> String {
        percent(self.true_positives, self.predicted)
    }

    pub fn recall_percent(&self) -> String {
        percent(self.true_positives, self.reference)
    }

    pub fn f1_percent(&self) -> String {
        percent(2 * self.true_positives, self.predicted + self.reference)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `100 * num / den` with two decimals, rounded half to even on the exact
/// rational value. A zero denominator gives `0.00`.
pub fn percent(num: usize, den: usize) -> String {
    if den == 0 {
        return "0.00".to_string();
    }
    let scaled = num as u128 * 10_000;
    let den = den as u128;
    let mut hundredths = scaled / den;
    let rem = scaled % den;
    if 2 * rem > den || (2 * rem == den && hundredths % 2 == 1) {
        hundredths += 1;
    }
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScoreOptions {
    /// Score even when token text differs between the files.
    pub allow_token_mismatch: bool,
    /// Repair an invalid reference with this method instead of failing.
    pub reference_repair: Option<RepairMethod>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub scheme: Scheme,
    pub method: RepairMethod,
    /// Per-type counts sorted by type name.
    pub types: Vec<TypeCounts>,
    pub token_count: usize,
    /// Tokens whose repaired predicted label equals the reference label.
    pub token_matches: usize,
    /// Invalid transitions found in the prediction before repair.
    pub prediction_invalid_transitions: usize,
    /// Tokens changed by repair in the prediction.
    pub prediction_repaired_tokens: usize,
    /// Invalid transitions found in the reference; non-zero only when
    /// reference repair was requested.
    pub reference_invalid_transitions: usize,
}

impl ScoreReport {
    pub fn micro(&self) -> TypeCounts {
        self.types
            .iter()
            .fold(TypeCounts::new("ALL"), |mut acc, t| {
                acc.reference += t.reference;
                acc.predicted += t.predicted;
                acc.true_positives += t.true_positives;
                acc
            })
    }

    pub fn precision(&self) -> f64 {
        self.micro().precision()
    }

    pub fn recall(&self) -> f64 {
        self.micro().recall()
    }

    pub fn f1(&self) -> f64 {
        self.micro().f1()
    }

    pub fn token_accuracy(&self) -> f64 {
        ratio(self.token_matches, self.token_count)
    }

    /// Human-readable table with percentages to two decimals.
    pub fn format_table(&self) -> String {
        let micro = self.micro();
        let rows: Vec<&TypeCounts> = std::iter::once(&micro).chain(&self.types).collect();
        let width = rows
            .iter()
            .map(|r| r.entity_type.len())
            .max()
            .unwrap_or(0)
            .max(4);
        let mut out = String::new();
        let _ = writeln!(out, "Labels: {}  Repair: {}", self.scheme, self.method);
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>6}  {:>6}  {:>9}  {:>9}  {:>7}",
            "Type", "Precision", "Recall", "F1", "Reference", "Predicted", "Correct"
        );
        for row in rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>9}  {:>6}  {:>6}  {:>9}  {:>9}  {:>7}",
                row.entity_type,
                row.precision_percent(),
                row.recall_percent(),
                row.f1_percent(),
                row.reference,
                row.predicted,
                row.true_positives
            );
        }
        let _ = writeln!(
            out,
            "Token accuracy: {} ({}/{})",
            percent(self.token_matches, self.token_count),
            self.token_matches,
            self.token_count
        );
        let _ = writeln!(
            out,
            "Invalid transitions repaired in prediction: {}",
            self.prediction_invalid_transitions
        );
        out
    }

    /// Machine-readable rows with raw fractions, ending with a `MICRO` row.
    pub fn format_csv(&self) -> String {
        let mut out = String::from("entity_type,reference,predicted,tp,precision,recall,f1\n");
        let mut micro = self.micro();
        micro.entity_type = "MICRO".to_string();
        for row in self.types.iter().chain(std::iter::once(&micro)) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                row.entity_type,
                row.reference,
                row.predicted,
                row.true_positives,
                row.precision(),
                row.recall(),
                row.f1()
            );
        }
        out
    }
}

fn first_line(sentence: &Sentence) -> usize {
    sentence.rows()[0].line()
}

fn check_alignment(
    reference: &Corpus,
    prediction: &Corpus,
    allow_token_mismatch: bool,
) -> Result<()> {
    let refs: Vec<&Sentence> = reference.sentences().collect();
    let preds: Vec<&Sentence> = prediction.sentences().collect();
    for (i, (r, p)) in refs.iter().zip(&preds).enumerate() {
        if r.len() != p.len() {
            return Err(Error::Alignment(format!(
                "sentence {} has {} tokens in {} (line {}) but {} tokens in {} (line {})",
                i + 1,
                r.len(),
                reference.source_name(),
                first_line(r),
                p.len(),
                prediction.source_name(),
                first_line(p)
            )));
        }
    }
    if refs.len() != preds.len() {
        let i = refs.len().min(preds.len());
        let (longer, sentence) = if refs.len() > preds.len() {
            (reference.source_name(), refs[i])
        } else {
            (prediction.source_name(), preds[i])
        };
        return Err(Error::Alignment(format!(
            "{} has {} sentences but {} has {}; sentence {} (line {} of {}) has no counterpart",
            reference.source_name(),
            refs.len(),
            prediction.source_name(),
            preds.len(),
            i + 1,
            first_line(sentence),
            longer
        )));
    }
    let ref_docs: Vec<usize> = reference
        .documents()
        .iter()
        .map(|d| d.sentences().len())
        .collect();
    let pred_docs: Vec<usize> = prediction
        .documents()
        .iter()
        .map(|d| d.sentences().len())
        .collect();
    if ref_docs != pred_docs {
        return Err(Error::Alignment(format!(
            "document structure differs: {} has {} documents, {} has {}",
            reference.source_name(),
            ref_docs.len(),
            prediction.source_name(),
            pred_docs.len()
        )));
    }
    if !allow_token_mismatch {
        for (r, p) in reference.rows().zip(prediction.rows()) {
            if r.token() != p.token() {
                return Err(Error::TokenMismatch {
                    reference: r.token().to_string(),
                    reference_line: r.line(),
                    prediction: p.token().to_string(),
                    prediction_line: p.line(),
                });
            }
        }
    }
    Ok(())
}

/// Scores `prediction` against `reference` after repairing the prediction
/// with `method`.
///
/// The two files must have the same sentence structure. An invalid
/// reference is an error unless `options.reference_repair` is set.
pub fn score_pair(
    reference: &Corpus,
    prediction: &Corpus,
    scheme: Scheme,
    method: RepairMethod,
    options: &ScoreOptions,
) -> Result<ScoreReport> {
    check_alignment(reference, prediction, options.allow_token_mismatch)?;

    let ref_labels = parse_corpus_labels(reference, scheme)?;
    let ref_report = validate_labels(reference, &ref_labels, scheme);
    let mut reference_invalid_transitions = 0;
    let ref_labels = if ref_report.is_valid() {
        ref_labels
    } else if let Some(ref_method) = options.reference_repair {
        reference_invalid_transitions = ref_report.errors.len();
        repair_labels(reference, &ref_labels, scheme, ref_method)?.labels
    } else {
        return Err(Error::InvalidLabels {
            source_name: reference.source_name().to_string(),
            records: ref_report.errors,
            hint: "the reference must be valid under the declared scheme; repair it explicitly or request reference repair",
        });
    };

    let pred_labels = parse_corpus_labels(prediction, scheme)?;
    let prediction_invalid_transitions = validate_labels(prediction, &pred_labels, scheme)
        .errors
        .len();
    let repaired = repair_labels(prediction, &pred_labels, scheme, method)?;

    let mut counts: BTreeMap<String, TypeCounts> = BTreeMap::new();
    let mut token_matches = 0;
    for ((sentence, gold), pred) in reference.sentences().zip(&ref_labels).zip(&repaired.labels) {
        token_matches += gold.iter().zip(pred).filter(|(g, p)| g == p).count();
        if sentence.is_docstart() {
            continue;
        }
        let gold_chunks = decode(gold, scheme)?;
        let pred_chunks = decode(pred, scheme)?;
        tally(&mut counts, &gold_chunks, &pred_chunks);
    }

    Ok(ScoreReport {
        scheme,
        method,
        types: counts.into_values().collect(),
        token_count: reference.token_count(),
        token_matches,
        prediction_invalid_transitions,
        prediction_repaired_tokens: repaired.records.len(),
        reference_invalid_transitions,
    })
}

fn tally(counts: &mut BTreeMap<String, TypeCounts>, gold: &[Chunk], pred: &[Chunk]) {
    let gold_set: HashSet<&Chunk> = gold.iter().collect();
    for chunk in gold {
        counts
            .entry(chunk.entity_type.clone())
            .or_insert_with(|| TypeCounts::new(&chunk.entity_type))
            .reference += 1;
    }
    for chunk in pred {
        let row = counts
            .entry(chunk.entity_type.clone())
            .or_insert_with(|| TypeCounts::new(&chunk.entity_type));
        row.predicted += 1;
        if gold_set.contains(chunk) {
            row.true_positives += 1;
        }
    }
}

/// Number of invalid transitions in `prediction`, i.e. the number a repair
/// method has to deal with.
pub fn count_repairs(prediction: &Corpus, scheme: Scheme) -> Result<usize> {
    let labels = parse_corpus_labels(prediction, scheme)?;
    Ok(validate_labels(prediction, &labels, scheme).errors.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conll::parse_corpus;

    fn corpus(labels: &[&[&str]], name: &str) -> Corpus {
        let mut text = String::new();
        for (i, sentence) in labels.iter().enumerate() {
            if i > 0 {
                text.push('\n');
            }
            for (j, label) in sentence.iter().enumerate() {
                text.push_str(&format!("t{i}_{j} {label}\n"));
            }
        }
        parse_corpus(text.as_bytes(), name).unwrap()
    }

    fn score(gold: &[&[&str]], pred: &[&[&str]], method: RepairMethod) -> ScoreReport {
        score_pair(
            &corpus(gold, "gold"),
            &corpus(pred, "pred"),
            Scheme::BIO,
            method,
            &ScoreOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn percent_rounding() {
        assert_eq!(percent(1, 3), "33.33");
        assert_eq!(percent(2, 3), "66.67");
        assert_eq!(percent(1, 1), "100.00");
        assert_eq!(percent(0, 0), "0.00");
        // 1/32 = 3.125%: exact tie, rounds to even.
        assert_eq!(percent(1, 32), "3.12");
        // 3/32 = 9.375%: tie, rounds up to even.
        assert_eq!(percent(3, 32), "9.38");
        assert_eq!(percent(1, 8), "12.50");
    }

    #[test]
    fn identical_files_score_perfectly() {
        let gold: &[&[&str]] = &[&["B-PER", "I-PER", "O"], &["O", "B-LOC"]];
        let r = score(gold, gold, RepairMethod::None);
        assert_eq!(r.micro().f1_percent(), "100.00");
        assert_eq!(r.precision(), 1.0);
        assert_eq!(r.token_accuracy(), 1.0);
    }

    #[test]
    fn type_mismatch_halves_scores() {
        let r = score(
            &[&["B-PER", "I-PER", "O", "B-LOC"]],
            &[&["B-PER", "I-PER", "O", "B-ORG"]],
            RepairMethod::None,
        );
        let micro = r.micro();
        assert_eq!(
            (micro.true_positives, micro.predicted, micro.reference),
            (1, 2, 2)
        );
        assert_eq!(micro.precision_percent(), "50.00");
        assert_eq!(micro.recall_percent(), "50.00");
        assert_eq!(micro.f1_percent(), "50.00");
        let types: Vec<&str> = r.types.iter().map(|t| t.entity_type.as_str()).collect();
        assert_eq!(types, ["LOC", "ORG", "PER"]);
        assert_eq!(r.token_matches, 3);
    }

    #[test]
    fn example1_under_begin_and_discard() {
        let gold: &[&[&str]] = &[&["O", "B-ORG", "I-ORG", "I-ORG", "O", "O", "B-MISC", "B-ORG"]];
        let pred: &[&[&str]] = &[&["O", "I-ORG", "I-ORG", "I-ORG", "O", "O", "B-MISC", "I-ORG"]];
        let begin = score(gold, pred, RepairMethod::Begin).micro();
        assert_eq!(
            (
                begin.precision_percent(),
                begin.recall_percent(),
                begin.f1_percent()
            ),
            ("100.00".into(), "100.00".into(), "100.00".into())
        );
        let discard = score(gold, pred, RepairMethod::Discard).micro();
        assert_eq!(
            (
                discard.precision_percent(),
                discard.recall_percent(),
                discard.f1_percent()
            ),
            ("100.00".into(), "33.33".into(), "50.00".into())
        );
    }

    #[test]
    fn none_rejects_invalid_prediction() {
        let err = score_pair(
            &corpus(&[&["O", "B-X"]], "g"),
            &corpus(&[&["O", "I-X"]], "p"),
            Scheme::BIO,
            RepairMethod::None,
            &ScoreOptions::default(),
        )
        .unwrap_err();
        assert!(err.is_validity());
    }

    #[test]
    fn empty_prediction_scores_zero() {
        let r = score(&[&["B-X", "O"]], &[&["O", "O"]], RepairMethod::None);
        assert_eq!(r.precision(), 0.0);
        assert_eq!(r.recall(), 0.0);
        assert_eq!(r.f1(), 0.0);
    }

    #[test]
    fn missing_sentence_is_an_alignment_error() {
        let err = score_pair(
            &corpus(&[&["O"], &["B-X"]], "g"),
            &corpus(&[&["O"]], "p"),
            Scheme::BIO,
            RepairMethod::Begin,
            &ScoreOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Alignment(_)), "{err:?}");
        assert!(err.to_string().contains("sentence 2"));
    }

    #[test]
    fn short_sentence_is_an_alignment_error() {
        let err = score_pair(
            &corpus(&[&["O", "O"], &["B-X"]], "g"),
            &corpus(&[&["O"], &["B-X"]], "p"),
            Scheme::BIO,
            RepairMethod::Begin,
            &ScoreOptions::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("sentence 1 has 2 tokens"), "{err}");
    }

    #[test]
    fn token_text_mismatch() {
        let gold = parse_corpus(b"a B-X\nb O\n", "g").unwrap();
        let pred = parse_corpus(b"a B-X\nc O\n", "p").unwrap();
        let err = score_pair(
            &gold,
            &pred,
            Scheme::BIO,
            RepairMethod::None,
            &ScoreOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::TokenMismatch {
                reference_line: 2,
                ..
            }
        ));
        let options = ScoreOptions {
            allow_token_mismatch: true,
            ..Default::default()
        };
        assert!(score_pair(&gold, &pred, Scheme::BIO, RepairMethod::None, &options).is_ok());
    }

    #[test]
    fn invalid_reference_requires_opt_in() {
        let gold = corpus(&[&["O", "I-X"]], "g");
        let pred = corpus(&[&["O", "B-X"]], "p");
        let err = score_pair(
            &gold,
            &pred,
            Scheme::BIO,
            RepairMethod::Begin,
            &ScoreOptions::default(),
        )
        .unwrap_err();
        assert!(err.is_validity());
        let options = ScoreOptions {
            reference_repair: Some(RepairMethod::Begin),
            ..Default::default()
        };
        let r = score_pair(&gold, &pred, Scheme::BIO, RepairMethod::Begin, &options).unwrap();
        assert_eq!(r.reference_invalid_transitions, 1);
        assert_eq!(r.f1(), 1.0);
    }

    #[test]
    fn count_repairs_examples() {
        assert_eq!(
            count_repairs(&corpus(&[&["O", "B-X"]], "p"), Scheme::BIO).unwrap(),
            0
        );
        let example1 = corpus(
            &[&["O", "I-ORG", "I-ORG", "I-ORG", "O", "O", "B-MISC", "I-ORG"]],
            "p",
        );
        assert_eq!(count_repairs(&example1, Scheme::BIO).unwrap(), 2);
        let synthetic = corpus(&[&["O", "I-PER"], &["B-LOC", "I-ORG"]], "p");
        assert_eq!(count_repairs(&synthetic, Scheme::BIO).unwrap(), 2);
    }

    #[test]
    fn csv_output() {
        let r = score(
            &[&["B-PER", "I-PER", "O", "B-LOC"]],
            &[&["B-PER", "I-PER", "O", "B-ORG"]],
            RepairMethod::None,
        );
        assert_eq!(
            r.format_csv(),
            "entity_type,reference,predicted,tp,precision,recall,f1\n\
             LOC,1,0,0,0,0,0\n\
             ORG,0,1,0,0,0,0\n\
             PER,1,1,1,1,1,1\n\
             MICRO,2,2,1,0.5,0.5,0.5\n"
        );
    }
}
