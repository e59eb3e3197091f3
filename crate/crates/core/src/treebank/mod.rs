//! Dependency treebank types and CoNLL-U / CoNLL-X readers and writers.

mod conllu;
mod conllx;
mod features;
mod morph;
mod validate;

pub use conllu::{read_conllu, read_conllu_file, to_conllu_string, write_conllu, write_conllu_file};
pub use conllx::{read_conllx, read_conllx_file};
pub use features::FeatureSet;
pub use morph::{convert_morphotag, MorphMapping};
pub use validate::{validate_sentence, Severity, Violation};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TreebankError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("sentence {sentence}: {message}")]
    Validation { sentence: String, message: String },
    #[error("invalid features: {0}")]
    Feature(String),
    #[error("morphotag `{code}`: {message}")]
    Morphotag { code: String, message: String },
    #[error("mapping file line {line}: {message}")]
    Mapping { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Stream(#[from] std::io::Error),
}

/// One syntactic word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: FeatureSet,
    /// 0 is the artificial root.
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl Token {
    /// A token with only id, form, and tree annotation set.
    pub fn new(id: usize, form: impl Into<String>, upos: impl Into<String>, head: usize, deprel: impl Into<String>) -> Self {
        Token {
            id,
            form: form.into(),
            lemma: String::new(),
            upos: upos.into(),
            xpos: String::new(),
            feats: FeatureSet::new(),
            head,
            deprel: deprel.into(),
            deps: String::new(),
            misc: String::new(),
        }
    }
}

/// A multiword token line such as `1-2`. Never counted as a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiwordRange {
    pub start: usize,
    pub end: usize,
    pub form: String,
    /// MISC column, carried verbatim.
    pub misc: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sentence {
    /// Comment lines including the leading `#`.
    pub comments: Vec<String>,
    pub tokens: Vec<Token>,
    pub ranges: Vec<MultiwordRange>,
    /// Text the sentence was read from, e.g. `marianus`.
    pub source_label: String,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    fn comment_value(&self, key: &str) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let rest = c.strip_prefix('#')?.trim_start();
            let rest = rest.strip_prefix(key)?.trim_start();
            Some(rest.strip_prefix('=')?.trim())
        })
    }

    /// Value of the `# sent_id =` comment.
    pub fn sent_id(&self) -> Option<&str> {
        self.comment_value("sent_id")
    }

    /// Value of the `# text =` comment.
    pub fn text(&self) -> Option<&str> {
        self.comment_value("text")
    }

    /// Human-readable locator for error messages.
    pub fn describe(&self, index: usize) -> String {
        match self.sent_id() {
            Some(id) => format!("#{} (sent_id {id})", index + 1),
            None => format!("#{}", index + 1),
        }
    }

    pub fn heads(&self) -> Vec<usize> {
        self.tokens.iter().map(|t| t.head).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Treebank {
    pub sentences: Vec<Sentence>,
}

impl Treebank {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        Treebank { sentences }
    }

    /// Number of syntactic words; multiword ranges are not counted.
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn find_by_sent_id(&self, id: &str) -> Option<&Sentence> {
        self.sentences.iter().find(|s| s.sent_id() == Some(id))
    }

    /// Appends all sentences of `other`.
    pub fn extend(&mut self, other: Treebank) {
        self.sentences.extend(other.sentences);
    }
}

impl FromIterator<Sentence> for Treebank {
    fn from_iter<I: IntoIterator<Item = Sentence>>(iter: I) -> Self {
        Treebank::new(iter.into_iter().collect())
    }
}
