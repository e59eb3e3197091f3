use serde::{Deserialize, Serialize};

use super::EvalResult;

/// One model's scores on one test set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub test_set: String,
    pub model: String,
    pub uas: f64,
    pub las: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upos: Option<f64>,
}

impl ScoreRow {
    pub fn new(test_set: impl Into<String>, model: impl Into<String>, uas: f64, las: f64) -> Self {
        ScoreRow { test_set: test_set.into(), model: model.into(), uas, las, upos: None }
    }

    pub fn from_result(test_set: impl Into<String>, model: impl Into<String>, r: &EvalResult) -> Self {
        ScoreRow { upos: Some(r.upos_acc), ..ScoreRow::new(test_set, model, r.uas, r.las) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBlock {
    pub test_set: String,
    pub rows: Vec<ScoreRow>,
    /// Index into `rows` of the best row: highest LAS, then UAS, then first listed.
    pub best: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub blocks: Vec<ReportBlock>,
}

impl ReportTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Groups rows into per-test-set blocks, keeping first-appearance order of
/// test sets and input order of models inside a block.
pub fn report_tables(rows: &[ScoreRow]) -> ReportTable {
    let mut blocks: Vec<ReportBlock> = Vec::new();
    for row in rows {
        match blocks.iter_mut().find(|b| b.test_set == row.test_set) {
            Some(b) => b.rows.push(row.clone()),
            None => blocks.push(ReportBlock { test_set: row.test_set.clone(), rows: vec![row.clone()], best: 0 }),
        }
    }
    for b in &mut blocks {
        for (i, r) in b.rows.iter().enumerate() {
            let best = &b.rows[b.best];
            if r.las > best.las || (r.las == best.las && r.uas > best.uas) {
                b.best = i;
            }
        }
    }
    ReportTable { blocks }
}

impl std::fmt::Display for ReportTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let set_w = self.blocks.iter().map(|b| b.test_set.len()).chain([8]).max().unwrap_or(8);
        let model_w = self.blocks.iter().flat_map(|b| &b.rows).map(|r| r.model.len()).chain([5]).max().unwrap_or(5);
        let with_upos = self.blocks.iter().flat_map(|b| &b.rows).any(|r| r.upos.is_some());
        write!(f, "{:<set_w$}  {:<model_w$}  {:>7}  {:>7}", "Test set", "Model", "UAS", "LAS")?;
        if with_upos {
            write!(f, "  {:>7}", "UPOS")?;
        }
        writeln!(f)?;
        for b in &self.blocks {
            for (i, r) in b.rows.iter().enumerate() {
                let label = if i == 0 { b.test_set.as_str() } else { "" };
                let mark = if i == b.best { "*" } else { "" };
                let (uas, las) = (format!("{mark}{:.2}", r.uas), format!("{mark}{:.2}", r.las));
                write!(f, "{label:<set_w$}  {:<model_w$}  {uas:>7}  {las:>7}", r.model)?;
                if let Some(u) = r.upos {
                    write!(f, "  {u:>7.2}")?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}
