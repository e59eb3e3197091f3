use serde::{Deserialize, Serialize};

use super::ModelError;

/// Hyperparameters of the joint tagger and parser.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    /// Character embedding size; also the size of the character BiLSTM
    /// summary, split evenly between the two directions.
    pub d_char: usize,
    pub d_word: usize,
    pub d_pos: usize,
    /// Tagging BiLSTM followed by parsing BiLSTM; only 2 is supported.
    pub n_bilstm_layers: usize,
    /// Hidden state size per direction.
    pub d_lstm: usize,
    pub d_mlp: usize,
    pub epochs: usize,
    pub seed: u64,
    pub word_dropout_alpha: f64,
    /// Words seen at most this often in training may be replaced by UNK.
    pub unk_threshold: u32,
    pub learning_rate: f64,
    /// Chance of feeding the gold tag instead of the predicted one to the
    /// parser during training.
    pub gold_tag_prob: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            d_char: 50,
            d_word: 100,
            d_pos: 100,
            n_bilstm_layers: 2,
            d_lstm: 128,
            d_mlp: 100,
            epochs: 30,
            seed: 1,
            word_dropout_alpha: 0.25,
            unk_threshold: 1,
            learning_rate: 1e-3,
            gold_tag_prob: 0.5,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::Config(m));
        for (name, v) in [
            ("d_char", self.d_char),
            ("d_word", self.d_word),
            ("d_pos", self.d_pos),
            ("d_lstm", self.d_lstm),
            ("d_mlp", self.d_mlp),
        ] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if !self.d_char.is_multiple_of(2) {
            return bad(format!("d_char must be even, got {}", self.d_char));
        }
        if self.n_bilstm_layers != 2 {
            return bad(format!("n_bilstm_layers must be 2, got {}", self.n_bilstm_layers));
        }
        if !(self.word_dropout_alpha >= 0.0 && self.word_dropout_alpha.is_finite()) {
            return bad("word_dropout_alpha must be a finite non-negative number".into());
        }
        if !(0.0..=1.0).contains(&self.gold_tag_prob) {
            return bad("gold_tag_prob must lie in [0, 1]".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive".into());
        }
        Ok(())
    }

    /// Width of a token representation: word embedding plus character summary.
    pub fn d_token(&self) -> usize {
        self.d_word + self.d_char
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = ModelConfig::default();
        assert_eq!((c.d_char, c.d_word, c.d_pos, c.n_bilstm_layers), (50, 100, 100, 2));
        assert_eq!((c.d_lstm, c.d_mlp, c.epochs), (128, 100, 30));
        assert_eq!(c.d_token(), 150);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        for c in [
            ModelConfig { d_char: 7, ..Default::default() },
            ModelConfig { d_mlp: 0, ..Default::default() },
            ModelConfig { n_bilstm_layers: 3, ..Default::default() },
            ModelConfig { gold_tag_prob: 1.5, ..Default::default() },
        ] {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: ModelConfig = serde_json::from_str(r#"{"d_lstm": 256, "d_mlp": 200}"#).unwrap();
        assert_eq!((c.d_lstm, c.d_mlp, c.d_word), (256, 200, 100));
    }
}
