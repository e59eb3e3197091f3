use serde::{Deserialize, Serialize};

use super::{train_with, EpochLog, ModelConfig, ModelError, ParserModel};
use crate::treebank::Treebank;
use crate::Scalar;

pub const DEFAULT_LSTM_GRID: [usize; 2] = [128, 256];
pub const DEFAULT_MLP_GRID: [usize; 3] = [100, 200, 300];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub d_lstm: usize,
    pub d_mlp: usize,
    pub dev_las: f64,
    pub dev_uas: f64,
    pub dev_upos: f64,
    pub best_epoch: usize,
    pub num_values: usize,
}

/// Grid results ranked best first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub model: String,
    pub rows: Vec<GridRow>,
}

impl std::fmt::Display for GridReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let w = self.model.len().max(5);
        writeln!(f, "{:<w$}  {:>4}  {:>4}  {:>6}  {:>6}", "Model", "LSTM", "MLP", "LAS", "UAS")?;
        for r in &self.rows {
            writeln!(f, "{:<w$}  {:>4}  {:>4}  {:>6.2}  {:>6.2}", self.model, r.d_lstm, r.d_mlp, r.dev_las, r.dev_uas)?;
        }
        Ok(())
    }
}

/// Trains every `(d_lstm, d_mlp)` combination with the same seed and data
/// and ranks by development LAS, then UAS, then fewer parameters.
/// `on_epoch` receives each run's sizes and epoch log as training proceeds.
pub fn grid_search<T: Scalar>(
    name: &str,
    base: &ModelConfig,
    train: &Treebank,
    dev: &Treebank,
    lstm_grid: &[usize],
    mlp_grid: &[usize],
    mut on_epoch: impl FnMut(usize, usize, &EpochLog),
) -> Result<(GridReport, ParserModel<T>), ModelError> {
    if lstm_grid.is_empty() || mlp_grid.is_empty() {
        return Err(ModelError::Config("grid search needs at least one size per dimension".into()));
    }
    let mut runs = Vec::new();
    for &d_lstm in lstm_grid {
        for &d_mlp in mlp_grid {
            let cfg = ModelConfig { d_lstm, d_mlp, ..base.clone() };
            let (model, log) = train_with::<T>(&cfg, train, dev, |e| on_epoch(d_lstm, d_mlp, e))?;
            let best = log.best();
            let (las, uas, upos) = best.dev.map_or((0.0, 0.0, 0.0), |r| (r.las, r.uas, r.upos_acc));
            let row = GridRow {
                d_lstm,
                d_mlp,
                dev_las: las,
                dev_uas: uas,
                dev_upos: upos,
                best_epoch: log.best_epoch,
                num_values: model.num_values(),
            };
            runs.push((row, model));
        }
    }
    // stable sort keeps grid order for complete ties
    runs.sort_by(|(a, _), (b, _)| {
        b.dev_las
            .total_cmp(&a.dev_las)
            .then(b.dev_uas.total_cmp(&a.dev_uas))
            .then(a.num_values.cmp(&b.num_values))
    });
    let rows = runs.iter().map(|(r, _)| r.clone()).collect();
    let best = runs.into_iter().next().map(|(_, m)| m).expect("non-empty grid");
    Ok((GridReport { model: name.to_string(), rows }, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{predict, train};
    use crate::treebank::{Sentence, Token};

    fn tiny() -> Treebank {
        Treebank::new(vec![Sentence {
            tokens: vec![Token::new(1, "a", "X", 2, "dep"), Token::new(2, "b", "Y", 0, "root")],
            ..Default::default()
        }])
    }

    fn base() -> ModelConfig {
        ModelConfig { d_char: 2, d_word: 2, d_pos: 2, epochs: 2, ..Default::default() }
    }

    #[test]
    fn runs_every_combination_ranked() {
        let (report, _) = grid_search::<f32>("toy", &base(), &tiny(), &tiny(), &[2, 3], &[2, 3, 4], |_, _, _| {}).unwrap();
        assert_eq!(report.rows.len(), 6);
        for w in report.rows.windows(2) {
            assert!(w[0].dev_las >= w[1].dev_las);
        }
        assert!(report.to_string().lines().count() == 7);
    }

    #[test]
    fn singleton_grid_equals_plain_training() {
        let (report, best) = grid_search::<f64>("toy", &base(), &tiny(), &tiny(), &[3], &[4], |_, _, _| {}).unwrap();
        let cfg = ModelConfig { d_lstm: 3, d_mlp: 4, ..base() };
        let (model, log) = train::<f64>(&cfg, &tiny(), &tiny()).unwrap();
        assert_eq!(report.rows[0].best_epoch, log.best_epoch);
        assert_eq!(predict(&best, &tiny()).unwrap(), predict(&model, &tiny()).unwrap());
        for ((_, a), (_, b)) in best.params().iter().zip(model.params().iter()) {
            assert_eq!(a.value, b.value);
        }
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(grid_search::<f32>("toy", &base(), &tiny(), &tiny(), &[], &[4], |_, _, _| {}).is_err());
    }
}
