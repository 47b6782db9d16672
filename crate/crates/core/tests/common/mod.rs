//! Test-only oracles. These work on raw label strings and share no code
//! with the library's decoding and repair paths.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::Rng;

pub const TYPES: [&str; 3] = ["PER", "LOC", "ORG"];

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn split(label: &str) -> (&str, Option<&str>) {
    match label.split_once('-') {
        Some((p, t)) => (p, Some(t)),
        None => (label, None),
    }
}

/// Chunks of a valid BIO sequence, as (start, end, type).
pub fn naive_decode_bio(labels: &[String]) -> Vec<(usize, usize, String)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut current = String::new();
    for (i, label) in labels.iter().enumerate() {
        let (prefix, ty) = split(label);
        if prefix == "I" {
            assert_eq!(ty, Some(current.as_str()), "oracle fed an invalid sequence");
            continue;
        }
        if let Some(s) = start.take() {
            out.push((s, i, current.clone()));
        }
        if prefix == "B" {
            start = Some(i);
            current = ty.unwrap().to_string();
        }
    }
    if let Some(s) = start {
        out.push((s, labels.len(), current));
    }
    out
}

fn continues(prev: Option<&String>, ty: &str) -> bool {
    prev.is_some_and(|p| *p == format!("B-{ty}") || *p == format!("I-{ty}"))
}

/// conlleval-style: an I- that does not continue a same-type chunk becomes B-.
pub fn naive_begin(labels: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for label in labels {
        let (prefix, ty) = split(label);
        let fixed = match (prefix, ty) {
            ("I", Some(t)) if !continues(out.last(), t) => format!("B-{t}"),
            _ => label.clone(),
        };
        out.push(fixed);
    }
    out
}

/// An I- that does not continue a same-type chunk, and everything it
/// drags along, becomes O.
pub fn naive_discard(labels: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for label in labels {
        let (prefix, ty) = split(label);
        let fixed = match (prefix, ty) {
            ("I", Some(t)) if !continues(out.last(), t) => "O".to_string(),
            _ => label.clone(),
        };
        out.push(fixed);
    }
    out
}

pub fn naive_bio_valid(labels: &[String]) -> bool {
    naive_begin(labels) == labels
}

/// Number of invalid BIO transitions: I-X not preceded by B-X or I-X.
pub fn naive_bio_error_count(labels: &[String]) -> usize {
    (0..labels.len())
        .filter(|&i| {
            let (prefix, ty) = split(&labels[i]);
            prefix == "I" && !continues(i.checked_sub(1).map(|j| &labels[j]), ty.unwrap())
        })
        .count()
}

/// Random label from {O, B-T, I-T}.
pub fn random_bio_label(rng: &mut StdRng, types: usize) -> String {
    let ty = TYPES[rng.gen_range(0..types)];
    match rng.gen_range(0..3) {
        0 => "O".to_string(),
        1 => format!("B-{ty}"),
        _ => format!("I-{ty}"),
    }
}

pub fn random_bio_sequence(rng: &mut StdRng, max_len: usize, types: usize) -> Vec<String> {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| random_bio_label(rng, types)).collect()
}

/// Random non-overlapping sorted chunks over `len` tokens.
pub fn random_chunks(rng: &mut StdRng, len: usize, types: usize) -> Vec<(usize, usize, String)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < len {
        if rng.gen_bool(0.45) {
            let max = (len - i).min(4);
            let span = rng.gen_range(1..=max);
            out.push((i, i + span, TYPES[rng.gen_range(0..types)].to_string()));
            i += span;
        } else {
            i += 1;
        }
    }
    out
}

/// Canonical BIO labels for a chunk list.
pub fn naive_encode_bio(chunks: &[(usize, usize, String)], len: usize) -> Vec<String> {
    let mut labels = vec!["O".to_string(); len];
    for (s, e, t) in chunks {
        labels[*s] = format!("B-{t}");
        for label in &mut labels[s + 1..*e] {
            *label = format!("I-{t}");
        }
    }
    labels
}

pub fn has_adjacent_same_type(chunks: &[(usize, usize, String)]) -> bool {
    chunks
        .windows(2)
        .any(|w| w[0].1 == w[1].0 && w[0].2 == w[1].2)
}

/// CoNLL text for sentences of labels, tokens named `w{sentence}_{index}`.
pub fn conll_text(sentences: &[Vec<String>]) -> String {
    let mut text = String::new();
    for (i, sentence) in sentences.iter().enumerate() {
        if i > 0 {
            text.push('\n');
        }
        for (j, label) in sentence.iter().enumerate() {
            text.push_str(&format!("w{i}_{j} {label}\n"));
        }
    }
    text
}

/// (TP, FP, FN) by set intersection of (sentence, start, end, type).
pub fn naive_counts(gold: &[Vec<String>], pred: &[Vec<String>]) -> (usize, usize, usize) {
    let collect = |sentences: &[Vec<String>]| -> BTreeSet<(usize, usize, usize, String)> {
        sentences
            .iter()
            .enumerate()
            .flat_map(|(i, s)| {
                naive_decode_bio(s)
                    .into_iter()
                    .map(move |(a, b, t)| (i, a, b, t))
            })
            .collect()
    };
    let g = collect(gold);
    let p = collect(pred);
    let tp = g.intersection(&p).count();
    (tp, p.len() - tp, g.len() - tp)
}
