//! Attachment and tagging scores against gold annotation.

mod reference;
mod report;

use serde::{Deserialize, Serialize};

use crate::treebank::Treebank;

pub use reference::{published_scores, PublishedTable, CROSS_VALIDATION};
pub use report::{report_tables, ReportBlock, ReportTable, ScoreRow};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("gold has {gold} sentences, prediction has {pred}")]
    SentenceCount { gold: usize, pred: usize },
    #[error("sentence {sentence}: gold has {gold} tokens, prediction has {pred}")]
    TokenCount { sentence: String, gold: usize, pred: usize },
    #[error("sentence {sentence}, token {token}: gold form `{gold}` but predicted `{pred}`")]
    Form { sentence: String, token: usize, gold: String, pred: String },
}

/// How dependency relations are compared for LAS.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    /// Exact string match.
    #[default]
    Full,
    /// Compare only the part before the first `:` (`obl:tmod` matches `obl`).
    Universal,
}

impl LabelMode {
    fn same(self, a: &str, b: &str) -> bool {
        match self {
            LabelMode::Full => a == b,
            LabelMode::Universal => universal(a) == universal(b),
        }
    }
}

impl std::str::FromStr for LabelMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(LabelMode::Full),
            "universal" => Ok(LabelMode::Universal),
            _ => Err(format!("unknown label mode `{s}` (expected full or universal)")),
        }
    }
}

fn universal(label: &str) -> &str {
    label.split(':').next().unwrap_or(label)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounts {
    pub words: usize,
    pub head: usize,
    pub head_and_label: usize,
    pub upos: usize,
}

impl std::ops::Add for EvalCounts {
    type Output = EvalCounts;

    fn add(self, o: EvalCounts) -> EvalCounts {
        EvalCounts {
            words: self.words + o.words,
            head: self.head + o.head,
            head_and_label: self.head_and_label + o.head_and_label,
            upos: self.upos + o.upos,
        }
    }
}

/// Percentages are rounded half-up to two decimals from the exact counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub uas: f64,
    pub las: f64,
    pub upos_acc: f64,
    pub counts: EvalCounts,
}

impl EvalResult {
    pub fn from_counts(counts: EvalCounts) -> Self {
        EvalResult {
            uas: percent(counts.head, counts.words),
            las: percent(counts.head_and_label, counts.words),
            upos_acc: percent(counts.upos, counts.words),
            counts,
        }
    }
}

impl std::fmt::Display for EvalResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = &self.counts;
        writeln!(f, "UAS: {:.2} ({}/{})", self.uas, c.head, c.words)?;
        writeln!(f, "LAS: {:.2} ({}/{})", self.las, c.head_and_label, c.words)?;
        write!(f, "UPOS: {:.2} ({}/{})", self.upos_acc, c.upos, c.words)
    }
}

/// `100·correct/total` rounded half-up to hundredths, computed in integers.
/// An empty denominator counts as full agreement.
pub fn percent(correct: usize, total: usize) -> f64 {
    if total == 0 {
        return 100.0;
    }
    let (c, n) = (correct as u128, total as u128);
    let hundredths = (20_000 * c + n) / (2 * n);
    hundredths as f64 / 100.0
}

/// Scores `pred` against `gold`. Tokenization must be identical; multiword
/// ranges are ignored since only syntactic words carry heads.
pub fn evaluate(gold: &Treebank, pred: &Treebank, mode: LabelMode) -> Result<EvalResult, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::SentenceCount { gold: gold.len(), pred: pred.len() });
    }
    let mut counts = EvalCounts::default();
    for (i, (gs, ps)) in gold.sentences.iter().zip(&pred.sentences).enumerate() {
        if gs.len() != ps.len() {
            return Err(EvalError::TokenCount { sentence: gs.describe(i), gold: gs.len(), pred: ps.len() });
        }
        for (g, p) in gs.tokens.iter().zip(&ps.tokens) {
            if g.form != p.form {
                return Err(EvalError::Form {
                    sentence: gs.describe(i),
                    token: g.id,
                    gold: g.form.clone(),
                    pred: p.form.clone(),
                });
            }
            counts.words += 1;
            if g.upos == p.upos {
                counts.upos += 1;
            }
            if g.head == p.head {
                counts.head += 1;
                if mode.same(&g.deprel, &p.deprel) {
                    counts.head_and_label += 1;
                }
            }
        }
    }
    Ok(EvalResult::from_counts(counts))
}
