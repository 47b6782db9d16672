//! CoNLL-style delimited files.
//!
//! One token per line, fields separated by runs of spaces or tabs, the token
//! text in the first field and the label in the last. Blank lines separate
//! sentences and a `-DOCSTART-` row opens a new document.

use crate::error::{Error, Result};

pub const DOCSTART: &str = "-DOCSTART-";

/// One non-blank input line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenRow {
    fields: Vec<String>,
    line: usize,
}

impl TokenRow {
    pub fn new(fields: Vec<String>, line: usize) -> Result<Self> {
        if fields.len() < 2 {
            return Err(Error::Contract(format!(
                "a token row needs at least 2 fields, got {}",
                fields.len()
            )));
        }
        if let Some(bad) = fields
            .iter()
            .find(|f| f.is_empty() || f.chars().any(is_delimiter))
        {
            return Err(Error::Contract(format!(
                "invalid field {bad:?} in token row"
            )));
        }
        Ok(TokenRow { fields, line })
    }

    pub fn fields(&self) -> &[String] {
        &self.fields
    }

    pub fn token(&self) -> &str {
        &self.fields[0]
    }

    pub fn label(&self) -> &str {
        &self.fields[self.fields.len() - 1]
    }

    /// 1-based line number in the source file.
    pub fn line(&self) -> usize {
        self.line
    }

    pub fn is_docstart(&self) -> bool {
        self.token() == DOCSTART
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    rows: Vec<TokenRow>,
}

impl Sentence {
    pub fn new(rows: Vec<TokenRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Contract(
                "a sentence must contain at least one row".into(),
            ));
        }
        if rows.windows(2).any(|w| w[0].line >= w[1].line) {
            return Err(Error::Contract(
                "line numbers must increase within a sentence".into(),
            ));
        }
        Ok(Sentence { rows })
    }

    pub fn rows(&self) -> &[TokenRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(TokenRow::label)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(TokenRow::token)
    }

    /// A one-row sentence holding only a `-DOCSTART-` marker.
    pub fn is_docstart(&self) -> bool {
        self.rows.len() == 1 && self.rows[0].is_docstart()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    sentences: Vec<Sentence>,
    has_docstart_marker: bool,
}

impl Document {
    pub fn new(sentences: Vec<Sentence>, has_docstart_marker: bool) -> Result<Self> {
        if sentences.is_empty() {
            return Err(Error::Contract(
                "a document must contain at least one sentence".into(),
            ));
        }
        Ok(Document {
            sentences,
            has_docstart_marker,
        })
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn has_docstart_marker(&self) -> bool {
        self.has_docstart_marker
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    source_name: String,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, source_name: impl Into<String>) -> Self {
        Corpus {
            documents,
            source_name: source_name.into(),
        }
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    /// All sentences in file order, across documents.
    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.documents.iter().flat_map(|d| d.sentences.iter())
    }

    pub fn rows(&self) -> impl Iterator<Item = &TokenRow> {
        self.sentences().flat_map(|s| s.rows.iter())
    }

    pub fn document_count(&self) -> usize {
        self.documents.len()
    }

    pub fn sentence_count(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }

    pub fn token_count(&self) -> usize {
        self.sentences().map(Sentence::len).sum()
    }

    /// The label column, in file order.
    pub fn labels(&self) -> Vec<String> {
        self.rows().map(|r| r.label().to_string()).collect()
    }
}

fn is_delimiter(c: char) -> bool {
    c == ' ' || c == '\t'
}

#[derive(Default)]
struct Builder {
    documents: Vec<Document>,
    sentences: Vec<Sentence>,
    rows: Vec<TokenRow>,
    marked: bool,
}

impl Builder {
    fn end_sentence(&mut self) {
        if !self.rows.is_empty() {
            self.sentences.push(Sentence {
                rows: std::mem::take(&mut self.rows),
            });
        }
    }

    fn end_document(&mut self) {
        self.end_sentence();
        if !self.sentences.is_empty() {
            self.documents.push(Document {
                sentences: std::mem::take(&mut self.sentences),
                has_docstart_marker: self.marked,
            });
        }
    }
}

/// Parses a whole CoNLL-style file.
///
/// Blank lines delimit sentences (runs of them collapse). A row whose first
/// field is `-DOCSTART-` closes the current document and is kept as a
/// one-row sentence at the start of the next one.
pub fn parse_corpus(input: &[u8], source_name: &str) -> Result<Corpus> {
    let text = std::str::from_utf8(input).map_err(|e| Error::Encoding {
        source_name: source_name.to_string(),
        offset: e.valid_up_to(),
    })?;

    let mut builder = Builder::default();
    for (idx, raw_line) in text.split('\n').enumerate() {
        let line_number = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.trim().is_empty() {
            builder.end_sentence();
            continue;
        }
        let fields: Vec<String> = line
            .split(is_delimiter)
            .filter(|f| !f.is_empty())
            .map(str::to_string)
            .collect();
        if fields.len() < 2 {
            return Err(Error::Format {
                source_name: source_name.to_string(),
                line: line_number,
                message: format!(
                    "expected at least 2 whitespace-separated fields (token and label), found {}",
                    fields.len()
                ),
            });
        }
        let row = TokenRow {
            fields,
            line: line_number,
        };
        if row.is_docstart() {
            builder.end_document();
            builder.marked = true;
            builder.rows.push(row);
            builder.end_sentence();
        } else {
            builder.rows.push(row);
        }
    }
    builder.end_document();

    Ok(Corpus {
        documents: builder.documents,
        source_name: source_name.to_string(),
    })
}

/// Writes `corpus` back out with its label column replaced by `labels`.
///
/// Fields are joined by a single space, sentences are separated by one blank
/// line and the output ends with a newline (an empty corpus writes nothing).
pub fn write_corpus<S: AsRef<str>>(corpus: &Corpus, labels: &[S]) -> Result<Vec<u8>> {
    let expected = corpus.token_count();
    if labels.len() != expected {
        return Err(Error::LabelCount {
            expected,
            actual: labels.len(),
        });
    }

    let mut out = String::new();
    let mut labels = labels.iter();
    for (i, sentence) in corpus.sentences().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for row in &sentence.rows {
            let label = labels.next().expect("label count checked above");
            for field in &row.fields[..row.fields.len() - 1] {
                out.push_str(field);
                out.push(' ');
            }
            out.push_str(label.as_ref());
            out.push('\n');
        }
    }
    Ok(out.into_bytes())
}
