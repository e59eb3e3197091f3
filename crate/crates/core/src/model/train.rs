use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_vocab, predict, sentence_loss, ModelConfig, ModelError, ParserModel};
use crate::eval::{evaluate, EvalResult, LabelMode};
use crate::nn::{adam_update, AdamConfig, Graph};
use crate::treebank::Treebank;
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    /// 1-based.
    pub epoch: usize,
    pub mean_loss: f64,
    /// `None` when there is no development data.
    pub dev: Option<EvalResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    pub epochs: Vec<EpochLog>,
    /// Epoch whose parameters were kept.
    pub best_epoch: usize,
}

impl TrainingLog {
    pub fn best(&self) -> &EpochLog {
        &self.epochs[self.best_epoch - 1]
    }
}

/// [`train_with`] without progress reporting.
pub fn train<T: Scalar>(
    config: &ModelConfig,
    train: &Treebank,
    dev: &Treebank,
) -> Result<(ParserModel<T>, TrainingLog), ModelError> {
    train_with(config, train, dev, |_| {})
}

/// Trains for `config.epochs` passes with one Adam update per sentence in a
/// seeded shuffled order. After every epoch the model is scored on `dev` and
/// the parameters with the best LAS are kept (earliest epoch on ties). With
/// an empty `dev` the last epoch is kept.
pub fn train_with<T: Scalar>(
    config: &ModelConfig,
    train: &Treebank,
    dev: &Treebank,
    mut on_epoch: impl FnMut(&EpochLog),
) -> Result<(ParserModel<T>, TrainingLog), ModelError> {
    config.validate()?;
    if config.epochs == 0 {
        return Err(ModelError::Config("epochs must be at least 1".into()));
    }
    let vocab = build_vocab(train)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = ParserModel::<T>::new(config.clone(), vocab, &mut rng)?;
    let adam = AdamConfig { lr: config.learning_rate, ..Default::default() };

    let mut order: Vec<usize> = (0..train.len()).filter(|&i| !train.sentences[i].is_empty()).collect();
    let mut log = TrainingLog { epochs: Vec::with_capacity(config.epochs), best_epoch: 0 };
    let mut best: Option<(f64, crate::nn::ParamStore<T>)> = None;
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for &i in &order {
            let sentence = &train.sentences[i];
            let grads = {
                let mut g = Graph::new(model.params());
                let loss = sentence_loss(&mut g, &model, sentence, &mut rng).map_err(|e| match e {
                    ModelError::Sentence { message, .. } => {
                        ModelError::Sentence { sentence: sentence.describe(i), message }
                    }
                    e => e,
                })?;
                total += g.scalar(loss)?.as_f64();
                g.backward(loss)?
            };
            adam_update(model.params_mut(), &grads, &adam)?;
        }
        let dev_result = if dev.is_empty() {
            None
        } else {
            let pred = predict(&model, dev)?;
            Some(evaluate(dev, &pred, LabelMode::Full)?)
        };
        let entry = EpochLog { epoch, mean_loss: total / order.len().max(1) as f64, dev: dev_result };
        on_epoch(&entry);
        let score = dev_result.map_or(f64::INFINITY, |r| r.las);
        let improved = match &best {
            None => true,
            Some((b, _)) => dev_result.is_none() || score > *b,
        };
        if improved {
            best = Some((score, model.params().clone()));
            log.best_epoch = epoch;
        }
        log.epochs.push(entry);
    }
    let (_, params) = best.expect("at least one epoch");
    let model = ParserModel::from_parts(model.config.clone(), model.vocab.clone(), params)?;
    Ok((model, log))
}
