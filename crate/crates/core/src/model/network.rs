use std::collections::HashMap;

use rand::{Rng, RngCore};
use rayon::prelude::*;

use super::{decode_tree, ModelError, ParserModel, ScoreMatrix, UNK};
use crate::nn::{bilstm_run, bilstm_summary, grad_check, GradCheckReport, Graph, NnError, Var};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use crate::treebank::{validate_sentence, Sentence, Treebank};
use crate::Scalar;

/// Inference is deterministic; training draws word dropout from the RNG.
pub enum Mode<'r> {
    Infer,
    Train(&'r mut dyn RngCore),
}

fn argmax<T: Scalar>(xs: &[T]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// One vector per token: `[word embedding ; character BiLSTM summary]`.
///
/// In training mode a word seen at most `unk_threshold` times is replaced by
/// UNK with probability `α / (α + freq)`.
pub fn embed_tokens<T: Scalar>(
    g: &mut Graph<'_, T>,
    model: &ParserModel<T>,
    sentence: &Sentence,
    mode: &mut Mode<'_>,
) -> Result<Vec<Var>, ModelError> {
    let (cfg, vocab, l) = (&model.config, &model.vocab, model.layout());
    let mut char_cache: HashMap<&str, Var> = HashMap::new();
    let mut out = Vec::with_capacity(sentence.len());
    for t in &sentence.tokens {
        let mut w = vocab.word(&t.form);
        if let Mode::Train(rng) = mode {
            let freq = vocab.freq(w);
            if w != UNK && freq <= cfg.unk_threshold {
                let alpha = cfg.word_dropout_alpha;
                if rng.gen::<f64>() < alpha / (alpha + freq as f64) {
                    w = UNK;
                }
            }
        }
        let wv = g.row(l.word, w)?;
        let cv = match char_cache.get(t.form.as_str()) {
            Some(&v) => v,
            None => {
                let mut chars = Vec::new();
                for c in t.form.chars() {
                    chars.push(g.row(l.chr, vocab.char(c))?);
                }
                if chars.is_empty() {
                    chars.push(g.row(l.chr, UNK)?);
                }
                let v = bilstm_summary(g, &l.char_fwd, &l.char_bwd, &chars)?;
                char_cache.insert(&t.form, v);
                v
            }
        };
        out.push(g.concat(&[wv, cv]));
    }
    Ok(out)
}

pub struct TagOutput {
    /// Tag score vector per token, width `|upos|`.
    pub scores: Vec<Var>,
    /// Argmax tag per token, lowest index on ties.
    pub predicted: Vec<usize>,
}

/// Tagging BiLSTM over the token vectors followed by the tag MLP.
pub fn tag_sentence<T: Scalar>(
    g: &mut Graph<'_, T>,
    model: &ParserModel<T>,
    embedded: &[Var],
) -> Result<TagOutput, ModelError> {
    let l = model.layout();
    let states = bilstm_run(g, &l.tag_fwd, &l.tag_bwd, embedded)?;
    let mut scores = Vec::with_capacity(states.len());
    let mut predicted = Vec::with_capacity(states.len());
    for s in states {
        let v = l.tag_mlp.forward(g, s)?;
        predicted.push(argmax(g.value(v)));
        scores.push(v);
    }
    Ok(TagOutput { scores, predicted })
}

pub struct ArcScores<T> {
    /// Parsing BiLSTM states; index 0 is the root.
    pub states: Vec<Var>,
    arcs: Vec<Option<Var>>,
    pub matrix: ScoreMatrix<T>,
}

impl<T> ArcScores<T> {
    /// Tape node holding the score of arc `h -> d`.
    pub fn arc(&self, h: usize, d: usize) -> Var {
        let n = self.states.len();
        self.arcs[h * n + d].expect("arc between distinct nodes with d > 0")
    }
}

/// Parsing BiLSTM over `[token ; tag embedding]` with a learned root vector
/// in front, then the arc MLP on every `(head, dependent)` pair.
pub fn score_arcs<T: Scalar>(
    g: &mut Graph<'_, T>,
    model: &ParserModel<T>,
    embedded: &[Var],
    tags: &[usize],
) -> Result<ArcScores<T>, ModelError> {
    if tags.len() != embedded.len() {
        return Err(ModelError::Config(format!("{} tags for {} tokens", tags.len(), embedded.len())));
    }
    let l = model.layout();
    let n = embedded.len();
    let mut inputs = Vec::with_capacity(n + 1);
    inputs.push(g.param(l.root));
    for (&e, &t) in embedded.iter().zip(tags) {
        let p = g.row(l.pos, t)?;
        inputs.push(g.concat(&[e, p]));
    }
    let states = bilstm_run(g, &l.parse_fwd, &l.parse_bwd, &inputs)?;

    // W1·[s_h ; s_d] split into a head block and a dependent block
    let half = 2 * model.config.d_lstm;
    let mut heads = Vec::with_capacity(n + 1);
    for &s in &states {
        heads.push(l.arc_mlp.block(g, s, 0)?);
    }
    let b1 = g.param(l.arc_mlp.b1);
    let mut deps = vec![b1];
    for &s in &states[1..] {
        let d = l.arc_mlp.block(g, s, half)?;
        deps.push(g.add(d, b1)?);
    }

    let mut arcs = vec![None; (n + 1) * (n + 1)];
    let mut matrix = ScoreMatrix::new(n);
    for h in 0..=n {
        for d in 1..=n {
            if h == d {
                continue;
            }
            let pre = g.add(heads[h], deps[d])?;
            let hidden = g.tanh(pre);
            let v = l.arc_mlp.output(g, hidden)?;
            matrix.set(h, d, g.scalar(v)?);
            arcs[h * (n + 1) + d] = Some(v);
        }
    }
    Ok(ArcScores { states, arcs, matrix })
}

/// Label score vectors for every dependent given its head.
pub fn label_arcs<T: Scalar>(
    g: &mut Graph<'_, T>,
    model: &ParserModel<T>,
    states: &[Var],
    heads: &[usize],
) -> Result<Vec<Var>, ModelError> {
    let l = model.layout();
    let mut out = Vec::with_capacity(heads.len());
    for (i, &h) in heads.iter().enumerate() {
        let x = g.concat(&[states[h], states[i + 1]]);
        out.push(l.label_mlp.forward(g, x)?);
    }
    Ok(out)
}

struct Gold {
    upos: Vec<usize>,
    heads: Vec<usize>,
    deprels: Vec<usize>,
}

fn gold_indices<T: Scalar>(model: &ParserModel<T>, sentence: &Sentence) -> Result<Gold, ModelError> {
    let err = |message: String| ModelError::Sentence { sentence: sentence.describe(0), message };
    if sentence.is_empty() {
        return Err(err("sentence has no tokens".into()));
    }
    if let Some(v) = validate_sentence(sentence).into_iter().find(|v| v.is_error()) {
        return Err(err(v.to_string()));
    }
    let mut gold = Gold { upos: Vec::new(), heads: sentence.heads(), deprels: Vec::new() };
    for t in &sentence.tokens {
        gold.upos.push(model.vocab.upos_index(&t.upos).ok_or_else(|| err(format!("unknown tag `{}`", t.upos)))?);
        gold.deprels
            .push(model.vocab.deprel_index(&t.deprel).ok_or_else(|| err(format!("unknown relation `{}`", t.deprel)))?);
    }
    Ok(gold)
}

/// Joint training loss of one annotated sentence:
///
/// * cross-entropy of the tag scores against the gold tags,
/// * structured hinge `max(0, max_y [s(y) + Δ(y)] − s(gold))` where `Δ`
///   counts arcs not in the gold tree,
/// * cross-entropy of the label scores at the gold heads.
///
/// The parser sees the gold tag of a token with probability
/// `gold_tag_prob` and the predicted tag otherwise.
pub fn sentence_loss<T: Scalar>(
    g: &mut Graph<'_, T>,
    model: &ParserModel<T>,
    sentence: &Sentence,
    rng: &mut dyn RngCore,
) -> Result<Var, ModelError> {
    let gold = gold_indices(model, sentence)?;
    let n = sentence.len();
    let embedded = embed_tokens(g, model, sentence, &mut Mode::Train(&mut *rng))?;
    let tags = tag_sentence(g, model, &embedded)?;
    let mut terms = Vec::with_capacity(2 * n + 1);
    for (&s, &t) in tags.scores.iter().zip(&gold.upos) {
        terms.push(g.cross_entropy(s, t)?);
    }

    let fed: Vec<usize> = (0..n)
        .map(|i| if rng.gen::<f64>() < model.config.gold_tag_prob { gold.upos[i] } else { tags.predicted[i] })
        .collect();
    let arcs = score_arcs(g, model, &embedded, &fed)?;
    let mut augmented = arcs.matrix.clone();
    for d in 1..=n {
        for h in 0..=n {
            if h != d && h != gold.heads[d - 1] {
                augmented.set(h, d, augmented.get(h, d) + T::one());
            }
        }
    }
    let best = decode_tree(&augmented)?;
    let margin = augmented.tree_score(&best) - arcs.matrix.tree_score(&gold.heads);
    if best != gold.heads && margin > T::zero() {
        let mut diff = Vec::new();
        let mut wrong = 0;
        for d in 1..=n {
            let (p, q) = (best[d - 1], gold.heads[d - 1]);
            if p != q {
                wrong += 1;
                let delta = g.sub(arcs.arc(p, d), arcs.arc(q, d))?;
                diff.push(delta);
            }
        }
        let sum = g.sum(&diff)?;
        terms.push(g.offset(sum, T::lit(wrong as f64)));
    }

    let labels = label_arcs(g, model, &arcs.states, &gold.heads)?;
    for (&s, &r) in labels.iter().zip(&gold.deprels) {
        terms.push(g.cross_entropy(s, r)?);
    }
    Ok(g.sum(&terms)?)
}

/// Finite-difference check of the full training loss on one sentence.
/// Dropout and tag feeding replay the same draws from `seed` at every probe.
pub fn loss_grad_check<T: Scalar>(
    model: &ParserModel<T>,
    sentence: &Sentence,
    seed: u64,
    eps: f64,
) -> Result<GradCheckReport, ModelError> {
    let mut probe = model.clone();
    let report = grad_check(
        probe.params_mut(),
        |g| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sentence_loss(g, model, sentence, &mut rng).map_err(|e| NnError::InvalidArgument(e.to_string()))
        },
        eps,
    )?;
    Ok(report)
}

/// Predicted annotation of one sentence, as vocabulary indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub upos: Vec<usize>,
    pub heads: Vec<usize>,
    pub deprels: Vec<usize>,
}

impl Prediction {
    /// Overwrites UPOS, HEAD and DEPREL; every other column is kept.
    pub fn apply<T: Scalar>(&self, model: &ParserModel<T>, sentence: &mut Sentence) {
        for (i, t) in sentence.tokens.iter_mut().enumerate() {
            t.upos = model.vocab.upos_name(self.upos[i]).to_string();
            t.head = self.heads[i];
            t.deprel = model.vocab.deprel_name(self.deprels[i]).to_string();
        }
    }
}

/// Tags with the tagger, parses using the predicted tags, labels the decoded
/// tree. Deterministic.
pub fn predict_sentence<T: Scalar>(model: &ParserModel<T>, sentence: &Sentence) -> Result<Prediction, ModelError> {
    if sentence.is_empty() {
        return Ok(Prediction { upos: vec![], heads: vec![], deprels: vec![] });
    }
    let mut g = Graph::new(model.params());
    let embedded = embed_tokens(&mut g, model, sentence, &mut Mode::Infer)?;
    let tags = tag_sentence(&mut g, model, &embedded)?;
    let arcs = score_arcs(&mut g, model, &embedded, &tags.predicted)?;
    let heads = decode_tree(&arcs.matrix)?;
    let labels = label_arcs(&mut g, model, &arcs.states, &heads)?;
    let deprels = labels.iter().map(|&v| argmax(g.value(v))).collect();
    Ok(Prediction { upos: tags.predicted, heads, deprels })
}

/// Annotates every sentence in parallel; output order follows the input.
pub fn predict<T: Scalar>(model: &ParserModel<T>, tb: &Treebank) -> Result<Treebank, ModelError> {
    let sentences = tb
        .sentences
        .par_iter()
        .map(|s| {
            let p = predict_sentence(model, s)?;
            let mut out = s.clone();
            p.apply(model, &mut out);
            Ok(out)
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    Ok(Treebank::new(sentences))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_vocab, ModelConfig};
    use crate::treebank::Token;

    fn four_tokens() -> Sentence {
        Sentence {
            tokens: vec![
                Token::new(1, "in", "ADP", 2, "case"),
                Token::new(2, "domu", "NOUN", 3, "obl"),
                Token::new(3, "bě", "VERB", 0, "root"),
                Token::new(4, "on", "PRON", 3, "nsubj"),
            ],
            ..Default::default()
        }
    }

    fn small_model(seed: u64) -> ParserModel<f64> {
        let vocab = build_vocab(&Treebank::new(vec![four_tokens()])).unwrap();
        let cfg = ModelConfig { d_char: 4, d_word: 3, d_pos: 2, d_lstm: 3, d_mlp: 4, ..Default::default() };
        ParserModel::new(cfg, vocab, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn shapes() {
        let m = small_model(0);
        let s = four_tokens();
        let mut g = Graph::new(m.params());
        let e = embed_tokens(&mut g, &m, &s, &mut Mode::Infer).unwrap();
        assert_eq!(e.len(), 4);
        assert!(e.iter().all(|&v| g.value(v).len() == 7));
        let t = tag_sentence(&mut g, &m, &e).unwrap();
        assert!(t.scores.iter().all(|&v| g.value(v).len() == m.vocab.n_upos()));
        let a = score_arcs(&mut g, &m, &e, &t.predicted).unwrap();
        assert_eq!(a.matrix.n(), 4);
        assert_eq!(a.states.len(), 5);
        let labels = label_arcs(&mut g, &m, &a.states, &[2, 3, 0, 3]).unwrap();
        assert!(labels.iter().all(|&v| g.value(v).len() == m.vocab.n_deprels()));
        assert!(score_arcs(&mut g, &m, &e, &[0]).is_err());
    }

    #[test]
    fn default_token_width() {
        let vocab = build_vocab(&Treebank::new(vec![four_tokens()])).unwrap();
        let m = ParserModel::<f32>::new(ModelConfig::default(), vocab, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let mut g = Graph::new(m.params());
        let e = embed_tokens(&mut g, &m, &four_tokens(), &mut Mode::Infer).unwrap();
        assert!(e.iter().all(|&v| g.value(v).len() == 150));
    }

    #[test]
    fn inference_is_repeatable() {
        let m = small_model(1);
        let a = predict_sentence(&m, &four_tokens()).unwrap();
        let b = predict_sentence(&m, &four_tokens()).unwrap();
        assert_eq!(a, b);
        let mut s = four_tokens();
        a.apply(&m, &mut s);
        assert!(validate_sentence(&s).is_empty());
    }

    #[test]
    fn loss_is_finite_and_non_negative() {
        for seed in 0..5 {
            let m = small_model(seed);
            let mut g = Graph::new(m.params());
            let loss = sentence_loss(&mut g, &m, &four_tokens(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let v = g.scalar(loss).unwrap();
            assert!(v.is_finite() && v >= 0.0, "{v}");
        }
    }

    #[test]
    fn loss_gradient_matches_finite_differences() {
        let report = loss_grad_check(&small_model(2), &four_tokens(), 9, 1e-6).unwrap();
        assert!(report.max_rel_error < 1e-4, "{report:?}");
    }

    #[test]
    fn invalid_gold_rejected() {
        let m = small_model(0);
        let mut s = four_tokens();
        s.tokens[0].head = 1;
        let mut g = Graph::new(m.params());
        assert!(sentence_loss(&mut g, &m, &s, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
        let mut s = four_tokens();
        s.tokens[0].upos = "INTJ".into();
        assert!(sentence_loss(&mut g, &m, &s, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn empty_treebank_predicts_empty() {
        let m = small_model(0);
        assert!(predict(&m, &Treebank::default()).unwrap().is_empty());
    }
}
