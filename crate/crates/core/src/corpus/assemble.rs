use std::fs;
use std::path::{Path, PathBuf};

use super::{
    split_text, CorpusError, DatasetFilter, Manifest, Section, SplitMode, SplitRatios, SplitResult,
    SplitStrategy, TextManifest, MIN_RATIO_TOKENS,
};
use crate::treebank::{read_conllu_file, write_conllu_file, Treebank, TreebankError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssembleOptions {
    pub ratios: SplitRatios,
    pub min_ratio_tokens: usize,
    pub strategy: SplitStrategy,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            ratios: SplitRatios::default(),
            min_ratio_tokens: MIN_RATIO_TOKENS,
            strategy: SplitStrategy::Contiguous,
        }
    }
}

fn read(label: &str, path: &Path) -> Result<Treebank, CorpusError> {
    if !path.exists() {
        return Err(CorpusError::Io {
            label: label.to_string(),
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        });
    }
    read_conllu_file(path, label).map_err(|source| match source {
        TreebankError::Io { source, .. } => CorpusError::Io {
            label: label.to_string(),
            path: path.to_path_buf(),
            source,
        },
        source => CorpusError::Treebank { label: label.to_string(), path: path.to_path_buf(), source },
    })
}

/// Reads a whole text; predefined texts without a whole-text file are the
/// concatenation of their sections.
pub fn load_text(text: &TextManifest) -> Result<Treebank, CorpusError> {
    match (&text.path, &text.predefined) {
        (Some(p), _) => read(&text.label, p),
        (None, Some(pre)) => {
            let mut tb = read(&text.label, &pre.train)?;
            tb.extend(read(&text.label, &pre.dev)?);
            tb.extend(read(&text.label, &pre.test)?);
            Ok(tb)
        }
        (None, None) => Err(CorpusError::Manifest {
            label: text.label.clone(),
            message: "no path".into(),
        }),
    }
}

/// Produces the train/dev/test partition of one text according to its split mode.
pub fn split_one(text: &TextManifest, opts: &AssembleOptions) -> Result<SplitResult, CorpusError> {
    match text.split_mode {
        SplitMode::Predefined => {
            let pre = text.predefined.as_ref().ok_or_else(|| CorpusError::Manifest {
                label: text.label.clone(),
                message: "predefined split without paths".into(),
            })?;
            let train = read(&text.label, &pre.train)?;
            let dev = read(&text.label, &pre.dev)?;
            let test = read(&text.label, &pre.test)?;
            let mut r = SplitResult { train, dev, test, ..Default::default() };
            r.report.train_tokens = r.train.token_count();
            r.report.dev_tokens = r.dev.token_count();
            r.report.test_tokens = r.test.token_count();
            r.report.total_tokens = r.report.train_tokens + r.report.dev_tokens + r.report.test_tokens;
            Ok(r)
        }
        SplitMode::TrainOnly => {
            let train = load_text(text)?;
            let mut r = SplitResult::default();
            r.report.train_only = true;
            r.report.total_tokens = train.token_count();
            r.report.train_tokens = r.report.total_tokens;
            r.train = train;
            Ok(r)
        }
        SplitMode::Ratio => {
            let tb = load_text(text)?;
            split_text(&tb, opts.ratios, opts.min_ratio_tokens, opts.strategy).map_err(|e| match e {
                CorpusError::EmptyText => CorpusError::Manifest {
                    label: text.label.clone(),
                    message: "text is empty".into(),
                },
                e => e,
            })
        }
    }
}

/// Concatenates one section of every text admitted by `filter`, in manifest order.
pub fn assemble_dataset(
    manifest: &Manifest,
    section: Section,
    filter: DatasetFilter,
    opts: &AssembleOptions,
) -> Result<Treebank, CorpusError> {
    let mut out = Treebank::default();
    for text in manifest.texts.iter().filter(|t| filter.matches(t.macro_area)) {
        if section != Section::Train && text.split_mode == SplitMode::TrainOnly {
            continue;
        }
        out.extend(split_one(text, opts)?.into_section(section));
    }
    Ok(out)
}

/// Writes `<label>.{train,dev,test}.conllu` for every text into `out_dir`.
/// Returns the written paths with each text's split result.
pub fn split_manifest(
    manifest: &Manifest,
    out_dir: &Path,
    opts: &AssembleOptions,
) -> Result<Vec<(String, SplitResult, [PathBuf; 3])>, CorpusError> {
    fs::create_dir_all(out_dir).map_err(|source| CorpusError::Io {
        label: "<output>".into(),
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for text in &manifest.texts {
        let result = split_one(text, opts)?;
        let paths = Section::ALL.map(|s| out_dir.join(format!("{}.{}.conllu", text.label, s.name())));
        for (s, p) in Section::ALL.iter().zip(&paths) {
            write_conllu_file(result.section(*s), p).map_err(|source| CorpusError::Treebank {
                label: text.label.clone(),
                path: p.clone(),
                source,
            })?;
        }
        written.push((text.label.clone(), result, paths));
    }
    Ok(written)
}
