use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{validate_sentence, FeatureSet, MultiwordRange, Sentence, Token, Treebank, TreebankError};

pub(crate) const COLUMNS: usize = 10;

pub(crate) fn opt(field: &str) -> String {
    if field == "_" {
        String::new()
    } else {
        field.to_string()
    }
}

fn blank(field: &str) -> &str {
    if field.is_empty() {
        "_"
    } else {
        field
    }
}

pub(crate) fn parse_index(field: &str, what: &str, line: usize) -> Result<usize, TreebankError> {
    field.parse::<usize>().map_err(|_| TreebankError::Parse {
        line,
        message: format!("{what} `{field}` is not a non-negative integer"),
    })
}

/// Accumulates lines of one sentence; shared by the CoNLL-U and CoNLL-X readers.
pub(crate) struct SentenceBuilder {
    pub sentence: Sentence,
    pub first_line: usize,
    source_label: String,
}

impl SentenceBuilder {
    pub fn new(source_label: &str) -> Self {
        SentenceBuilder {
            sentence: Sentence { source_label: source_label.to_string(), ..Default::default() },
            first_line: 0,
            source_label: source_label.to_string(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sentence.tokens.is_empty()
            && self.sentence.ranges.is_empty()
            && self.sentence.comments.is_empty()
    }

    pub fn touch(&mut self, line: usize) {
        if self.is_empty() {
            self.first_line = line;
        }
    }

    /// Closes the current sentence, checking id contiguity.
    pub fn finish(&mut self, index: usize, out: &mut Vec<Sentence>) -> Result<(), TreebankError> {
        if self.is_empty() {
            return Ok(());
        }
        let s = std::mem::replace(
            &mut self.sentence,
            Sentence { source_label: self.source_label.clone(), ..Default::default() },
        );
        if s.tokens.is_empty() {
            return Err(TreebankError::Validation {
                sentence: s.describe(index),
                message: format!("no token lines (starting at line {})", self.first_line),
            });
        }
        for (pos, t) in s.tokens.iter().enumerate() {
            if t.id != pos + 1 {
                return Err(TreebankError::Validation {
                    sentence: s.describe(index),
                    message: format!(
                        "token ids not contiguous from 1: expected {} but found {} (sentence starts at line {})",
                        pos + 1,
                        t.id,
                        self.first_line
                    ),
                });
            }
        }
        out.push(s);
        Ok(())
    }
}

/// Reads a CoNLL-U stream. Sentences keep their order, comments are kept verbatim.
pub fn read_conllu<R: BufRead>(reader: R, source_label: &str) -> Result<Treebank, TreebankError> {
    let mut sentences = Vec::new();
    let mut cur = SentenceBuilder::new(source_label);
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            cur.finish(sentences.len(), &mut sentences)?;
            continue;
        }
        cur.touch(lineno);
        if line.starts_with('#') {
            cur.sentence.comments.push(line.to_string());
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != COLUMNS {
            return Err(TreebankError::Parse {
                line: lineno,
                message: format!("expected {COLUMNS} tab-separated columns, found {}", cols.len()),
            });
        }
        let id = cols[0];
        if let Some((a, b)) = id.split_once('-') {
            let start = parse_index(a, "range start", lineno)?;
            let end = parse_index(b, "range end", lineno)?;
            if start == 0 || start >= end {
                return Err(TreebankError::Parse {
                    line: lineno,
                    message: format!("invalid multiword range `{id}`"),
                });
            }
            cur.sentence.ranges.push(MultiwordRange {
                start,
                end,
                form: cols[1].to_string(),
                misc: opt(cols[9]),
            });
            continue;
        }
        if id.contains('.') {
            return Err(TreebankError::Parse {
                line: lineno,
                message: format!("empty node `{id}` is not supported"),
            });
        }
        let id = parse_index(id, "token id", lineno)?;
        if id == 0 {
            return Err(TreebankError::Parse { line: lineno, message: "token id 0".into() });
        }
        let head = parse_index(cols[6], "head", lineno)?;
        let feats: FeatureSet = cols[5].parse().map_err(|e: TreebankError| TreebankError::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if cols[1].is_empty() {
            return Err(TreebankError::Parse { line: lineno, message: "empty FORM".into() });
        }
        cur.sentence.tokens.push(Token {
            id,
            form: cols[1].to_string(),
            lemma: opt(cols[2]),
            upos: opt(cols[3]),
            xpos: opt(cols[4]),
            feats,
            head,
            deprel: opt(cols[7]),
            deps: opt(cols[8]),
            misc: opt(cols[9]),
        });
    }
    cur.finish(sentences.len(), &mut sentences)?;
    Ok(Treebank::new(sentences))
}

pub fn read_conllu_file(path: impl AsRef<Path>, source_label: &str) -> Result<Treebank, TreebankError> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|source| TreebankError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_conllu(BufReader::new(f), source_label)
}

/// Writes canonical CoNLL-U: LF endings, `_` for empty fields, sorted
/// features, and a blank line after every sentence.
///
/// Refuses sentences with error-level violations; multiple roots pass.
pub fn write_conllu<W: Write>(tb: &Treebank, mut w: W) -> Result<(), TreebankError> {
    for (i, s) in tb.sentences.iter().enumerate() {
        if let Some(v) = validate_sentence(s).into_iter().find(|v| v.is_error()) {
            return Err(TreebankError::Validation { sentence: s.describe(i), message: v.to_string() });
        }
        for c in &s.comments {
            writeln!(w, "{c}")?;
        }
        let mut ranges = s.ranges.iter().peekable();
        for t in &s.tokens {
            while let Some(r) = ranges.next_if(|r| r.start <= t.id) {
                writeln!(
                    w,
                    "{}-{}\t{}\t_\t_\t_\t_\t_\t_\t_\t{}",
                    r.start,
                    r.end,
                    r.form,
                    blank(&r.misc)
                )?;
            }
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.id,
                t.form,
                blank(&t.lemma),
                blank(&t.upos),
                blank(&t.xpos),
                t.feats,
                t.head,
                blank(&t.deprel),
                blank(&t.deps),
                blank(&t.misc)
            )?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Serializes to an in-memory string.
pub fn to_conllu_string(tb: &Treebank) -> Result<String, TreebankError> {
    let mut buf = Vec::new();
    write_conllu(tb, &mut buf)?;
    Ok(String::from_utf8(buf).expect("writer emits UTF-8"))
}

pub fn write_conllu_file(tb: &Treebank, path: impl AsRef<Path>) -> Result<(), TreebankError> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|source| TreebankError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_conllu(tb, BufWriter::new(f))
}
