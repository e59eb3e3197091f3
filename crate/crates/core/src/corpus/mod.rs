//! Corpus manifests, per-text splitting, dataset assembly, and statistics.

mod assemble;
mod manifest;
mod split;
mod stats;

pub use assemble::{assemble_dataset, load_text, split_manifest, split_one, AssembleOptions};
pub use manifest::{
    DatasetFilter, MacroArea, Manifest, PredefinedPaths, SplitMode, TextManifest, Variety,
};
pub use split::{
    split_text, Section, SplitRatios, SplitReport, SplitResult, SplitStrategy, MIN_RATIO_TOKENS,
};
pub use stats::{corpus_stats, CorpusStats, TextStats, VarietyTotal};

use std::path::PathBuf;

use thiserror::Error;

use crate::treebank::TreebankError;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("text `{label}`: cannot read {}: {source}", path.display())]
    Io {
        label: String,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("text `{label}` ({}): {source}", path.display())]
    Treebank {
        label: String,
        path: PathBuf,
        #[source]
        source: TreebankError,
    },
    #[error("manifest entry `{label}`: {message}")]
    Manifest { label: String, message: String },
    #[error("duplicate text label `{0}` in manifest")]
    DuplicateLabel(String),
    #[error("malformed manifest: {0}")]
    Format(String),
    #[error("cannot split an empty text")]
    EmptyText,
    #[error("split ratios must be non-negative and sum to 1 (got {0})")]
    Ratios(f64),
}
