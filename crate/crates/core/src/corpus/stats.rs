use std::fmt;

use serde::Serialize;

use super::{load_text, CorpusError, MacroArea, Manifest, Variety};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TextStats {
    pub label: String,
    pub variety: Variety,
    pub macro_area: MacroArea,
    pub tokens: usize,
    pub sentences: usize,
    /// Count recorded in the manifest, if any.
    pub expected_tokens: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VarietyTotal {
    pub variety: Variety,
    pub macro_area: MacroArea,
    pub texts: usize,
    pub tokens: usize,
    pub sentences: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub texts: Vec<TextStats>,
    /// In fixed variety order, only varieties that occur.
    pub varieties: Vec<VarietyTotal>,
}

impl CorpusStats {
    pub fn variety_tokens(&self, v: Variety) -> usize {
        self.varieties.iter().find(|t| t.variety == v).map_or(0, |t| t.tokens)
    }

    pub fn total_tokens(&self) -> usize {
        self.texts.iter().map(|t| t.tokens).sum()
    }

    /// Texts whose counted tokens differ from the manifest's recorded count.
    pub fn mismatches(&self) -> Vec<&TextStats> {
        self.texts
            .iter()
            .filter(|t| t.expected_tokens.is_some_and(|e| e != t.tokens))
            .collect()
    }
}

/// Token and sentence counts per text and per variety.
pub fn corpus_stats(manifest: &Manifest) -> Result<CorpusStats, CorpusError> {
    let mut texts = Vec::with_capacity(manifest.texts.len());
    for t in &manifest.texts {
        let tb = load_text(t)?;
        texts.push(TextStats {
            label: t.label.clone(),
            variety: t.variety,
            macro_area: t.macro_area,
            tokens: tb.token_count(),
            sentences: tb.len(),
            expected_tokens: t.tokens,
        });
    }
    let varieties = Variety::ALL
        .iter()
        .filter_map(|&v| {
            let rows: Vec<_> = texts.iter().filter(|t| t.variety == v).collect();
            (!rows.is_empty()).then(|| VarietyTotal {
                variety: v,
                macro_area: v.macro_area(),
                texts: rows.len(),
                tokens: rows.iter().map(|t| t.tokens).sum(),
                sentences: rows.iter().map(|t| t.sentences).sum(),
            })
        })
        .collect();
    Ok(CorpusStats { texts, varieties })
}

fn thousands(n: usize) -> String {
    let s = n.to_string();
    let mut out = String::new();
    for (i, c) in s.chars().enumerate() {
        if i > 0 && (s.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8} {:<20} {:>10} {:>10}", "Variety", "Text", "Tokens", "Sentences")?;
        for t in &self.texts {
            writeln!(
                f,
                "{:<8} {:<20} {:>10} {:>10}",
                t.variety.name(),
                t.label,
                thousands(t.tokens),
                thousands(t.sentences)
            )?;
        }
        writeln!(f)?;
        writeln!(f, "{:<14} {:<8} {:>6} {:>10} {:>10}", "Macro-area", "Variety", "Texts", "Tokens", "Sentences")?;
        for v in &self.varieties {
            writeln!(
                f,
                "{:<14} {:<8} {:>6} {:>10} {:>10}",
                v.macro_area.to_string(),
                v.variety.name(),
                v.texts,
                thousands(v.tokens),
                thousands(v.sentences)
            )?;
        }
        write!(f, "{:<14} {:<8} {:>6} {:>10}", "Total", "", self.texts.len(), thousands(self.total_tokens()))
    }
}
