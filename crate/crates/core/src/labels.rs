//! Label parsing and the per-scheme transition rules.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prefix {
    O,
    B,
    I,
    E,
    S,
    L,
    U,
    M,
    W,
}

impl Prefix {
    pub fn as_char(self) -> char {
        match self {
            Prefix::O => 'O',
            Prefix::B => 'B',
            Prefix::I => 'I',
            Prefix::E => 'E',
            Prefix::S => 'S',
            Prefix::L => 'L',
            Prefix::U => 'U',
            Prefix::M => 'M',
            Prefix::W => 'W',
        }
    }

    fn from_char(c: char) -> Option<Prefix> {
        Some(match c {
            'O' => Prefix::O,
            'B' => Prefix::B,
            'I' => Prefix::I,
            'E' => Prefix::E,
            'S' => Prefix::S,
            'L' => Prefix::L,
            'U' => Prefix::U,
            'M' => Prefix::M,
            'W' => Prefix::W,
            _ => return None,
        })
    }
}

/// A parsed tag such as `B-ORG` or `O`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    prefix: Prefix,
    entity_type: Option<String>,
}

impl Label {
    pub fn outside() -> Self {
        Label {
            prefix: Prefix::O,
            entity_type: None,
        }
    }

    /// A chunk label. `prefix` must not be `O`, and the type must be
    /// non-empty without whitespace.
    pub fn chunk(prefix: Prefix, entity_type: impl Into<String>) -> Result<Self> {
        let entity_type = entity_type.into();
        if prefix == Prefix::O {
            return Err(label_error(
                format!("O-{entity_type}"),
                "O labels carry no type",
            ));
        }
        if entity_type.is_empty() || entity_type.chars().any(char::is_whitespace) {
            return Err(label_error(
                format!("{}-{}", prefix.as_char(), entity_type),
                "entity type must be non-empty and contain no whitespace",
            ));
        }
        Ok(Label {
            prefix,
            entity_type: Some(entity_type),
        })
    }

    pub fn prefix(&self) -> Prefix {
        self.prefix
    }

    pub fn entity_type(&self) -> Option<&str> {
        self.entity_type.as_deref()
    }

    pub fn is_outside(&self) -> bool {
        self.prefix == Prefix::O
    }

    pub(crate) fn with_prefix(&self, prefix: Prefix) -> Label {
        debug_assert!(prefix != Prefix::O && self.entity_type.is_some());
        Label {
            prefix,
            entity_type: self.entity_type.clone(),
        }
    }

    pub(crate) fn with_type(&self, entity_type: &str) -> Label {
        debug_assert!(!self.is_outside());
        Label {
            prefix: self.prefix,
            entity_type: Some(entity_type.to_string()),
        }
    }

    fn same_type(&self, other: &Label) -> bool {
        self.entity_type.is_some() && self.entity_type == other.entity_type
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.entity_type {
            None => write!(f, "O"),
            Some(t) => write!(f, "{}-{}", self.prefix.as_char(), t),
        }
    }
}

/// Chunk encoding schemes. `BIO` is IOB2; BILOU, BMES and BMEOW are
/// relabelings of BIOES.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    IO,
    IOB1,
    BIO,
    BIOES,
    BILOU,
    BMES,
    BMEOW,
}

/// Position of a label within its chunk, shared by BIOES and its isomorphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Role {
    Outside,
    Begin,
    Inside,
    End,
    Single,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::IO,
        Scheme::IOB1,
        Scheme::BIO,
        Scheme::BIOES,
        Scheme::BILOU,
        Scheme::BMES,
        Scheme::BMEOW,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::IO => "IO",
            Scheme::IOB1 => "IOB1",
            Scheme::BIO => "BIO",
            Scheme::BIOES => "BIOES",
            Scheme::BILOU => "BILOU",
            Scheme::BMES => "BMES",
            Scheme::BMEOW => "BMEOW",
        }
    }

    pub fn prefix_alphabet(self) -> &'static [Prefix] {
        use Prefix::*;
        match self {
            Scheme::IO => &[O, I],
            Scheme::IOB1 | Scheme::BIO => &[O, B, I],
            Scheme::BIOES => &[O, B, I, E, S],
            Scheme::BILOU => &[O, B, I, L, U],
            Scheme::BMES => &[O, B, M, E, S],
            Scheme::BMEOW => &[O, B, M, E, W],
        }
    }

    /// True for BIOES and the schemes isomorphic to it.
    pub fn is_boundary_scheme(self) -> bool {
        matches!(
            self,
            Scheme::BIOES | Scheme::BILOU | Scheme::BMES | Scheme::BMEOW
        )
    }

    pub(crate) fn role(self, prefix: Prefix) -> Role {
        use Prefix::*;
        match (self, prefix) {
            (_, O) => Role::Outside,
            (_, B) => Role::Begin,
            (_, I) | (_, M) => Role::Inside,
            (_, E) | (_, L) => Role::End,
            (_, S) | (_, U) | (_, W) => Role::Single,
        }
    }

    pub(crate) fn prefix_for(self, role: Role) -> Prefix {
        use Prefix::*;
        match (self, role) {
            (_, Role::Outside) => O,
            (Scheme::IO, _) => I,
            (Scheme::IOB1, Role::Begin) | (Scheme::BIO, Role::Begin) => B,
            (Scheme::IOB1, _) | (Scheme::BIO, _) => I,
            (_, Role::Begin) => B,
            (Scheme::BIOES, Role::Inside) | (Scheme::BILOU, Role::Inside) => I,
            (_, Role::Inside) => M,
            (Scheme::BILOU, Role::End) => L,
            (_, Role::End) => E,
            (Scheme::BIOES, Role::Single) | (Scheme::BMES, Role::Single) => S,
            (Scheme::BILOU, Role::Single) => U,
            (Scheme::BMEOW, Role::Single) => W,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    /// Case-insensitive; `IOB2` is accepted as an alias of `BIO`.
    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        if upper == "IOB2" {
            return Ok(Scheme::BIO);
        }
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == upper)
            .ok_or_else(|| Error::Contract(format!("unknown label encoding scheme '{s}'")))
    }
}

fn label_error(raw: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::LabelFormat {
        raw: raw.into(),
        line: None,
        reason: reason.into(),
    }
}

/// Parses a raw label under `scheme`. Non-`O` labels are split at the first
/// hyphen, so `I-MISC-SUB` has type `MISC-SUB`.
pub fn parse_label(raw: &str, scheme: Scheme) -> Result<Label> {
    if raw == "O" {
        return Ok(Label::outside());
    }
    let Some((head, entity_type)) = raw.split_once('-') else {
        return Err(label_error(raw, "expected O or PREFIX-TYPE"));
    };
    let mut chars = head.chars();
    let prefix = match (chars.next(), chars.next()) {
        (Some(c), None) => Prefix::from_char(c),
        _ => None,
    };
    let Some(prefix) = prefix else {
        return Err(label_error(raw, format!("unknown prefix '{head}'")));
    };
    if prefix == Prefix::O {
        return Err(label_error(raw, "O labels carry no type"));
    }
    if !scheme.prefix_alphabet().contains(&prefix) {
        return Err(label_error(
            raw,
            format!("prefix '{head}' is not used by the {scheme} scheme"),
        ));
    }
    if entity_type.is_empty() {
        return Err(label_error(raw, "empty entity type"));
    }
    if entity_type.chars().any(char::is_whitespace) {
        return Err(label_error(raw, "entity type contains whitespace"));
    }
    Ok(Label {
        prefix,
        entity_type: Some(entity_type.to_string()),
    })
}

/// Whether `prev -> cur` can occur under `scheme`. `None` stands for the
/// sentence start (as `prev`) or the sentence end (as `cur`).
pub fn transition_valid(prev: Option<&Label>, cur: Option<&Label>, scheme: Scheme) -> bool {
    match scheme {
        Scheme::IO => true,
        Scheme::BIO => match cur {
            Some(cur) if cur.prefix == Prefix::I => {
                prev.is_some_and(|p| matches!(p.prefix, Prefix::B | Prefix::I) && p.same_type(cur))
            }
            _ => true,
        },
        Scheme::IOB1 => match cur {
            Some(cur) if cur.prefix == Prefix::B => {
                prev.is_some_and(|p| matches!(p.prefix, Prefix::B | Prefix::I) && p.same_type(cur))
            }
            _ => true,
        },
        _ => {
            let prev_open =
                prev.filter(|p| matches!(scheme.role(p.prefix), Role::Begin | Role::Inside));
            match (prev_open, cur) {
                (None, None) => true,
                (None, Some(cur)) => matches!(
                    scheme.role(cur.prefix),
                    Role::Outside | Role::Begin | Role::Single
                ),
                (Some(_), None) => false,
                (Some(p), Some(cur)) => {
                    matches!(scheme.role(cur.prefix), Role::Inside | Role::End) && p.same_type(cur)
                }
            }
        }
    }
}

/// An invalid transition within one sentence. `index` is the position of
/// the current label, or the sentence length for the sentence-end
/// transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadTransition {
    pub index: usize,
    pub previous: Option<Label>,
    pub current: Option<Label>,
}

impl BadTransition {
    pub fn previous_str(&self) -> String {
        self.previous
            .as_ref()
            .map_or_else(|| "start".to_string(), Label::to_string)
    }

    pub fn current_str(&self) -> String {
        self.current
            .as_ref()
            .map_or_else(|| "end".to_string(), Label::to_string)
    }
}

/// Every invalid transition over `start, l1, ..., ln, end`, in order.
pub fn invalid_transitions(labels: &[Label], scheme: Scheme) -> Vec<BadTransition> {
    let mut out = Vec::new();
    for index in 0..=labels.len() {
        let prev = index.checked_sub(1).map(|i| &labels[i]);
        let cur = labels.get(index);
        if !transition_valid(prev, cur, scheme) {
            out.push(BadTransition {
                index,
                previous: prev.cloned(),
                current: cur.cloned(),
            });
        }
    }
    out
}

pub fn is_valid_sequence(labels: &[Label], scheme: Scheme) -> bool {
    (0..=labels.len())
        .all(|i| transition_valid(i.checked_sub(1).map(|j| &labels[j]), labels.get(i), scheme))
}

pub(crate) fn first_invalid(labels: &[Label], scheme: Scheme) -> Option<BadTransition> {
    invalid_transitions(labels, scheme).into_iter().next()
}
