use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::conllu::{opt, parse_index, SentenceBuilder, COLUMNS};
use super::{convert_morphotag, MorphMapping, Token, Treebank, TreebankError};

/// Reads CoNLL-X (ID FORM LEMMA CPOSTAG POSTAG FEATS HEAD DEPREL PHEAD PDEPREL),
/// converting positional FEATS through `mapping`.
///
/// CPOSTAG becomes UPOS and POSTAG becomes XPOS. The projective columns are dropped.
pub fn read_conllx<R: BufRead>(
    reader: R,
    mapping: &MorphMapping,
    source_label: &str,
) -> Result<Treebank, TreebankError> {
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
        let id = parse_index(cols[0], "token id", lineno)?;
        if id == 0 {
            return Err(TreebankError::Parse { line: lineno, message: "token id 0".into() });
        }
        let head = parse_index(cols[6], "head", lineno)?;
        let feats = convert_morphotag(cols[5], mapping).map_err(|e| TreebankError::Parse {
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
            deps: String::new(),
            misc: String::new(),
        });
    }
    cur.finish(sentences.len(), &mut sentences)?;
    Ok(Treebank::new(sentences))
}

pub fn read_conllx_file(
    path: impl AsRef<Path>,
    mapping: &MorphMapping,
    source_label: &str,
) -> Result<Treebank, TreebankError> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|source| TreebankError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_conllx(BufReader::new(f), mapping, source_label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{read_conllu, to_conllu_string, validate_sentence};

    fn mapping() -> MorphMapping {
        "NUMB\ts\tNumber\tSing\nGEND\tn\tGender\tNeut\nCASE\tn\tCase\tNom\n".parse().unwrap()
    }

    const SRC: &str = "1\tslovo\tslovo\tNb\tNb\tNUMBs|GENDn|CASEn\t2\tsub\t_\t_\n2\tbě\tbyti\tV-\tV-\t_\t0\tpred\t_\t_\n\n";

    #[test]
    fn converts_feats() {
        let tb = read_conllx(SRC.as_bytes(), &mapping(), "x").unwrap();
        let t = &tb.sentences[0].tokens[0];
        assert_eq!(t.feats.to_string(), "Case=Nom|Gender=Neut|Number=Sing");
        assert!(tb.sentences[0].tokens[1].feats.is_empty());
        assert!(tb.sentences[0].ranges.is_empty());
    }

    #[test]
    fn unknown_key_reports_line() {
        let src = "1\ta\ta\tX\tX\tMOODi\t0\tpred\t_\t_\n\n";
        let err = read_conllx(src.as_bytes(), &mapping(), "x").unwrap_err();
        assert!(matches!(err, TreebankError::Parse { line: 1, .. }));
        assert!(err.to_string().contains("MOOD"));
    }

    #[test]
    fn converted_output_reads_back_clean() {
        let tb = read_conllx(SRC.as_bytes(), &mapping(), "x").unwrap();
        let text = to_conllu_string(&tb).unwrap();
        let back = read_conllu(text.as_bytes(), "x").unwrap();
        assert_eq!(back, tb);
        assert!(back.sentences.iter().all(|s| validate_sentence(s).is_empty()));
    }
}
