//! Mention-level view of label sequences.

use std::fmt;

use crate::error::{Error, Result};
use crate::labels::{first_invalid, Label, Prefix, Role, Scheme};

/// A typed mention covering tokens `start..end` of one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chunk {
    pub start: usize,
    pub end: usize,
    pub entity_type: String,
}

impl Chunk {
    pub fn new(start: usize, end: usize, entity_type: impl Into<String>) -> Self {
        Chunk {
            start,
            end,
            entity_type: entity_type.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }
}

impl fmt::Display for Chunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}..{})", self.entity_type, self.start, self.end)
    }
}

/// Decodes a valid label sequence into its chunks.
///
/// Invalid sequences are rejected with the first offending transition; use
/// [`crate::repair`] first if a repair is wanted.
pub fn decode(labels: &[Label], scheme: Scheme) -> Result<Vec<Chunk>> {
    if let Some(bad) = first_invalid(labels, scheme) {
        return Err(Error::InvalidTransition {
            index: bad.index,
            previous: bad.previous_str(),
            current: bad.current_str(),
        });
    }

    let mut chunks = Vec::new();
    let mut open: Option<(usize, &str)> = None;
    let close = |open: &mut Option<(usize, &str)>, end: usize, chunks: &mut Vec<Chunk>| {
        if let Some((start, ty)) = open.take() {
            chunks.push(Chunk::new(start, end, ty));
        }
    };

    for (i, label) in labels.iter().enumerate() {
        let Some(ty) = label.entity_type() else {
            close(&mut open, i, &mut chunks);
            continue;
        };
        let continues = open.is_some_and(|(_, open_ty)| open_ty == ty);
        match scheme {
            Scheme::IO => {
                if !continues {
                    close(&mut open, i, &mut chunks);
                    open = Some((i, ty));
                }
            }
            Scheme::BIO | Scheme::IOB1 => {
                let starts = label.prefix() == Prefix::B || !continues;
                if starts {
                    close(&mut open, i, &mut chunks);
                    open = Some((i, ty));
                }
            }
            _ => match scheme.role(label.prefix()) {
                Role::Begin => {
                    close(&mut open, i, &mut chunks);
                    open = Some((i, ty));
                }
                Role::Inside => {}
                Role::End => close(&mut open, i + 1, &mut chunks),
                Role::Single => chunks.push(Chunk::new(i, i + 1, ty)),
                Role::Outside => unreachable!("typed label"),
            },
        }
    }
    close(&mut open, labels.len(), &mut chunks);
    Ok(chunks)
}

/// Encodes chunks over a sentence of `length` tokens in the canonical form
/// of `scheme`.
pub fn encode(chunks: &[Chunk], length: usize, scheme: Scheme) -> Result<Vec<Label>> {
    check_chunks(chunks, length)?;
    let mut labels = vec![Label::outside(); length];
    let mut previous: Option<&Chunk> = None;
    for chunk in chunks {
        let ty = chunk.entity_type.as_str();
        match scheme {
            Scheme::IO | Scheme::BIO | Scheme::IOB1 => {
                let first = match scheme {
                    Scheme::IO => Prefix::I,
                    Scheme::BIO => Prefix::B,
                    _ => {
                        let touches_same_type = previous.is_some_and(|p| {
                            p.end == chunk.start && p.entity_type == chunk.entity_type
                        });
                        if touches_same_type {
                            Prefix::B
                        } else {
                            Prefix::I
                        }
                    }
                };
                labels[chunk.start] = Label::chunk(first, ty)?;
                for label in &mut labels[chunk.start + 1..chunk.end] {
                    *label = Label::chunk(Prefix::I, ty)?;
                }
            }
            _ => {
                if chunk.len() == 1 {
                    labels[chunk.start] = Label::chunk(scheme.prefix_for(Role::Single), ty)?;
                } else {
                    labels[chunk.start] = Label::chunk(scheme.prefix_for(Role::Begin), ty)?;
                    let inside = Label::chunk(scheme.prefix_for(Role::Inside), ty)?;
                    for label in &mut labels[chunk.start + 1..chunk.end - 1] {
                        *label = inside.clone();
                    }
                    labels[chunk.end - 1] = Label::chunk(scheme.prefix_for(Role::End), ty)?;
                }
            }
        }
        previous = Some(chunk);
    }
    Ok(labels)
}

fn check_chunks(chunks: &[Chunk], length: usize) -> Result<()> {
    let mut covered = 0;
    for chunk in chunks {
        if chunk.is_empty() || chunk.end > length {
            return Err(Error::ChunkContract(format!(
                "chunk {chunk} is empty or exceeds sentence length {length}"
            )));
        }
        if chunk.start < covered {
            return Err(Error::ChunkContract(format!(
                "chunk {chunk} overlaps or precedes the previous chunk"
            )));
        }
        covered = chunk.end;
    }
    Ok(())
}
