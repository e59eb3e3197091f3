//! Joint POS tagger and graph-based dependency parser.
//!
//! Tokens are embedded as a word vector plus a character BiLSTM summary.
//! A first BiLSTM feeds the tagger; a second one reads the token vectors
//! together with an embedding of each token's tag and feeds the arc and
//! label scorers. Trees are decoded with Chu-Liu/Edmonds.

mod config;
mod decode;
mod grid;
mod io;
mod network;
mod train;
mod vocab;

use rand::Rng;

use crate::eval::EvalError;
use crate::nn::{Init, LstmParams, MlpParams, NnError, ParamId, ParamStore};
use crate::treebank::TreebankError;
use crate::Scalar;

pub use config::ModelConfig;
pub use decode::{decode_tree, ScoreMatrix};
pub use grid::{grid_search, GridReport, GridRow, DEFAULT_LSTM_GRID, DEFAULT_MLP_GRID};
pub use io::{load_model, model_scalar_width, read_model, save_model, write_model, FORMAT_VERSION, MAGIC};
pub use network::{
    embed_tokens, label_arcs, loss_grad_check, predict, predict_sentence, score_arcs, sentence_loss, tag_sentence, ArcScores,
    Mode, Prediction, TagOutput,
};
pub use train::{train, train_with, EpochLog, TrainingLog};
pub use vocab::{build_vocab, Vocab, UNK};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("training data has no tokens")]
    EmptyTraining,
    #[error("sentence {sentence}: {message}")]
    Sentence { sentence: String, message: String },
    #[error("decoding failed: {0}")]
    Decode(String),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Treebank(#[from] TreebankError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("not a model file: expected header `SLAVPARSE`")]
    BadMagic,
    #[error("model format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("model stores {found}-byte scalars, expected {expected}")]
    ScalarWidthMismatch { found: u8, expected: u8 },
    #[error("model file is truncated")]
    Truncated,
    #[error("model checksum does not match its contents")]
    ChecksumMismatch,
    #[error("malformed model file: {0}")]
    Corrupt(String),
}

/// Where each component's parameters live in the store.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Layout {
    pub word: ParamId,
    pub chr: ParamId,
    pub pos: ParamId,
    pub root: ParamId,
    pub char_fwd: LstmParams,
    pub char_bwd: LstmParams,
    pub tag_fwd: LstmParams,
    pub tag_bwd: LstmParams,
    pub parse_fwd: LstmParams,
    pub parse_bwd: LstmParams,
    pub tag_mlp: MlpParams,
    pub arc_mlp: MlpParams,
    pub label_mlp: MlpParams,
}

#[derive(Clone, Debug)]
pub struct ParserModel<T> {
    pub config: ModelConfig,
    pub vocab: Vocab,
    params: ParamStore<T>,
    layout: Layout,
}

impl<T: Scalar> ParserModel<T> {
    /// Freshly initialized model for `vocab`.
    pub fn new<R: Rng>(config: ModelConfig, vocab: Vocab, rng: &mut R) -> Result<Self, ModelError> {
        config.validate()?;
        if vocab.n_upos() == 0 || vocab.n_deprels() == 0 {
            return Err(ModelError::EmptyTraining);
        }
        let c = &config;
        let (dc, dl) = (c.d_char / 2, c.d_lstm);
        let d_parse_in = c.d_token() + c.d_pos;
        let mut s = ParamStore::new();
        let word = s.add_lookup("embed.word", vocab.n_words(), c.d_word, rng)?;
        let chr = s.add_lookup("embed.char", vocab.n_chars(), c.d_char, rng)?;
        let pos = s.add_lookup("embed.pos", vocab.n_upos(), c.d_pos, rng)?;
        let root = s.add("parse.root", d_parse_in, 1, Init::Glorot, rng)?;
        let char_fwd = LstmParams::new(&mut s, "char.fwd", c.d_char, dc, rng)?;
        let char_bwd = LstmParams::new(&mut s, "char.bwd", c.d_char, dc, rng)?;
        let tag_fwd = LstmParams::new(&mut s, "tag.fwd", c.d_token(), dl, rng)?;
        let tag_bwd = LstmParams::new(&mut s, "tag.bwd", c.d_token(), dl, rng)?;
        let parse_fwd = LstmParams::new(&mut s, "parse.fwd", d_parse_in, dl, rng)?;
        let parse_bwd = LstmParams::new(&mut s, "parse.bwd", d_parse_in, dl, rng)?;
        let tag_mlp = MlpParams::new(&mut s, "mlp.tag", 2 * dl, c.d_mlp, vocab.n_upos(), rng)?;
        let arc_mlp = MlpParams::new(&mut s, "mlp.arc", 4 * dl, c.d_mlp, 1, rng)?;
        let label_mlp = MlpParams::new(&mut s, "mlp.label", 4 * dl, c.d_mlp, vocab.n_deprels(), rng)?;
        let layout = Layout {
            word,
            chr,
            pos,
            root,
            char_fwd,
            char_bwd,
            tag_fwd,
            tag_bwd,
            parse_fwd,
            parse_bwd,
            tag_mlp,
            arc_mlp,
            label_mlp,
        };
        Ok(ParserModel { config, vocab, params: s, layout })
    }

    /// Reassembles a model from stored parameters, checking that every shape
    /// agrees with the configuration and vocabulary.
    pub fn from_parts(config: ModelConfig, vocab: Vocab, params: ParamStore<T>) -> Result<Self, ModelError> {
        config.validate()?;
        let s = &params;
        let find = |name: &str| s.id(name).ok_or_else(|| NnError::UnknownParam(name.to_string()));
        let layout = Layout {
            word: find("embed.word")?,
            chr: find("embed.char")?,
            pos: find("embed.pos")?,
            root: find("parse.root")?,
            char_fwd: LstmParams::from_store(s, "char.fwd")?,
            char_bwd: LstmParams::from_store(s, "char.bwd")?,
            tag_fwd: LstmParams::from_store(s, "tag.fwd")?,
            tag_bwd: LstmParams::from_store(s, "tag.bwd")?,
            parse_fwd: LstmParams::from_store(s, "parse.fwd")?,
            parse_bwd: LstmParams::from_store(s, "parse.bwd")?,
            tag_mlp: MlpParams::from_store(s, "mlp.tag")?,
            arc_mlp: MlpParams::from_store(s, "mlp.arc")?,
            label_mlp: MlpParams::from_store(s, "mlp.label")?,
        };
        let c = &config;
        let (dc, dl, d_parse_in) = (c.d_char / 2, c.d_lstm, c.d_token() + c.d_pos);
        let shape = |id: ParamId| (s.get(id).rows, s.get(id).cols);
        let l = &layout;
        let checks = [
            ("embed.word", shape(l.word) == (vocab.n_words(), c.d_word)),
            ("embed.char", shape(l.chr) == (vocab.n_chars(), c.d_char)),
            ("embed.pos", shape(l.pos) == (vocab.n_upos(), c.d_pos)),
            ("parse.root", shape(l.root) == (d_parse_in, 1)),
            ("char", (l.char_fwd.d_in, l.char_fwd.d_h, l.char_bwd.d_in, l.char_bwd.d_h) == (c.d_char, dc, c.d_char, dc)),
            ("tag", (l.tag_fwd.d_in, l.tag_fwd.d_h, l.tag_bwd.d_in, l.tag_bwd.d_h) == (c.d_token(), dl, c.d_token(), dl)),
            (
                "parse",
                (l.parse_fwd.d_in, l.parse_fwd.d_h, l.parse_bwd.d_in, l.parse_bwd.d_h) == (d_parse_in, dl, d_parse_in, dl),
            ),
            ("mlp.tag", (l.tag_mlp.d_in, l.tag_mlp.d_hidden, l.tag_mlp.d_out) == (2 * dl, c.d_mlp, vocab.n_upos())),
            ("mlp.arc", (l.arc_mlp.d_in, l.arc_mlp.d_hidden, l.arc_mlp.d_out) == (4 * dl, c.d_mlp, 1)),
            (
                "mlp.label",
                (l.label_mlp.d_in, l.label_mlp.d_hidden, l.label_mlp.d_out) == (4 * dl, c.d_mlp, vocab.n_deprels()),
            ),
        ];
        if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
            return Err(ModelError::Corrupt(format!("`{name}` does not match the configuration")));
        }
        if s.len() != 3 + 1 + 6 * 8 + 3 * 4 {
            return Err(ModelError::Corrupt(format!("unexpected parameter count {}", s.len())));
        }
        Ok(ParserModel { config, vocab, params, layout })
    }

    pub fn params(&self) -> &ParamStore<T> {
        &self.params
    }

    pub(crate) fn params_mut(&mut self) -> &mut ParamStore<T> {
        &mut self.params
    }

    pub(crate) fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Total number of trainable values.
    pub fn num_values(&self) -> usize {
        self.params.num_values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{Sentence, Token, Treebank};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn from_parts_round_trip_and_mismatch() {
        let tb = Treebank::new(vec![Sentence {
            tokens: vec![Token::new(1, "a", "X", 0, "root")],
            ..Default::default()
        }]);
        let vocab = build_vocab(&tb).unwrap();
        let cfg = ModelConfig { d_char: 4, d_word: 3, d_pos: 2, d_lstm: 3, d_mlp: 5, ..Default::default() };
        let m = ParserModel::<f64>::new(cfg.clone(), vocab.clone(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let back = ParserModel::from_parts(cfg.clone(), vocab.clone(), m.params().clone()).unwrap();
        assert_eq!(back.layout, m.layout);
        let other = ModelConfig { d_mlp: 6, ..cfg };
        assert!(ParserModel::from_parts(other, vocab, m.params().clone()).is_err());
    }
}
