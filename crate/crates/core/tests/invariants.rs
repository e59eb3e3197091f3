use std::path::Path;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slavparse::eval::{evaluate, LabelMode};
use slavparse::model::{build_vocab, decode_tree, predict, predict_sentence, ModelConfig, ParserModel, ScoreMatrix};
use slavparse::treebank::{convert_morphotag, read_conllu, to_conllu_string, MorphMapping, Sentence, Token, Treebank};

const RELS: [&str; 5] = ["obl", "obl:tmod", "nsubj", "obj", "advmod"];
const FORMS: [&str; 5] = ["i", "reče", "kъ", "nimъ", "bogъ"];
const UPOS: [&str; 3] = ["NOUN", "VERB", "ADP"];

/// Heads as `attach[k] < k + 1` choices: word k+1 hangs from an earlier word
/// in `order`, so every draw is a single-root tree.
fn tree(order: &[usize], attach: &[usize]) -> Vec<usize> {
    let n = order.len();
    let mut heads = vec![0; n];
    for k in 1..n {
        heads[order[k] - 1] = order[attach[k] % k];
    }
    heads
}

fn sentence_strategy() -> impl Strategy<Value = Sentence> {
    (1usize..7)
        .prop_flat_map(|n| {
            (
                Just((1..=n).collect::<Vec<_>>()).prop_shuffle(),
                proptest::collection::vec(0usize..100, n),
                proptest::collection::vec((0usize..5, 0usize..3, 0usize..5), n),
            )
        })
        .prop_map(|(order, attach, labels)| {
            let heads = tree(&order, &attach);
            let tokens = heads
                .iter()
                .zip(&labels)
                .enumerate()
                .map(|(i, (&h, &(f, u, r)))| Token::new(i + 1, FORMS[f], UPOS[u], h, if h == 0 { "root" } else { RELS[r] }))
                .collect();
            Sentence { tokens, ..Default::default() }
        })
}

/// A prediction for `gold`: same words, perturbed heads and labels.
fn perturb(gold: &Sentence, noise: &[(usize, usize)]) -> Sentence {
    let n = gold.len();
    let mut s = gold.clone();
    for (t, &(h, r)) in s.tokens.iter_mut().zip(noise.iter().cycle()) {
        if h % 3 == 0 {
            t.head = h % (n + 1);
        }
        if r % 2 == 0 {
            t.deprel = RELS[r % RELS.len()].to_string();
        }
    }
    s
}

fn pair_strategy() -> impl Strategy<Value = (Treebank, Treebank)> {
    (
        proptest::collection::vec(sentence_strategy(), 1..6),
        proptest::collection::vec((0usize..40, 0usize..40), 1..10),
    )
        .prop_map(|(gold, noise)| {
            let pred = gold.iter().map(|s| perturb(s, &noise)).collect();
            (Treebank::new(gold), Treebank::new(pred))
        })
}

proptest! {
    #[test]
    fn las_never_exceeds_uas((gold, pred) in pair_strategy()) {
        let full = evaluate(&gold, &pred, LabelMode::Full).unwrap();
        let universal = evaluate(&gold, &pred, LabelMode::Universal).unwrap();
        prop_assert!(full.counts.head_and_label <= full.counts.head);
        prop_assert!(full.las <= full.uas);
        prop_assert!(universal.counts.head_and_label >= full.counts.head_and_label);
        prop_assert_eq!(universal.counts.head, full.counts.head);
    }

    #[test]
    fn identity_scores_full_marks((gold, _) in pair_strategy()) {
        let r = evaluate(&gold, &gold, LabelMode::Full).unwrap();
        prop_assert_eq!((r.uas, r.las, r.upos_acc), (100.0, 100.0, 100.0));
    }

    #[test]
    fn scores_ignore_sentence_order((gold, pred) in pair_strategy(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut order: Vec<usize> = (0..gold.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let g2 = Treebank::new(order.iter().map(|&i| gold.sentences[i].clone()).collect());
        let p2 = Treebank::new(order.iter().map(|&i| pred.sentences[i].clone()).collect());
        prop_assert_eq!(
            evaluate(&gold, &pred, LabelMode::Full).unwrap(),
            evaluate(&g2, &p2, LabelMode::Full).unwrap()
        );
    }

    #[test]
    fn counts_add_over_concatenation((g1, p1) in pair_strategy(), (g2, p2) in pair_strategy()) {
        let a = evaluate(&g1, &p1, LabelMode::Full).unwrap().counts;
        let b = evaluate(&g2, &p2, LabelMode::Full).unwrap().counts;
        let mut g = g1.clone();
        g.extend(g2);
        let mut p = p1.clone();
        p.extend(p2);
        prop_assert_eq!(evaluate(&g, &p, LabelMode::Full).unwrap().counts, a + b);
    }

    #[test]
    fn conllu_write_read_write_is_stable(sentences in proptest::collection::vec(sentence_strategy(), 1..5)) {
        let text = to_conllu_string(&Treebank::new(sentences)).unwrap();
        let back = read_conllu(text.as_bytes(), "prop").unwrap();
        prop_assert_eq!(to_conllu_string(&back).unwrap(), text);
    }

    #[test]
    fn decoded_tree_beats_any_tree(
        n in 1usize..8,
        cells in proptest::collection::vec(-50i32..50, 64),
        order in Just((1..=7).collect::<Vec<usize>>()).prop_shuffle(),
        attach in proptest::collection::vec(0usize..100, 7),
    ) {
        let s = ScoreMatrix::from_fn(n, |h, d| cells[h * 8 + d] as f64);
        let heads = decode_tree(&s).unwrap();
        prop_assert_eq!(heads.iter().filter(|&&h| h == 0).count(), 1);
        let order: Vec<usize> = order.into_iter().filter(|&i| i <= n).collect();
        let other = tree(&order, &attach[..n]);
        prop_assert!(s.tree_score(&heads) >= s.tree_score(&other));
    }

    #[test]
    fn morphotag_conversion_ignores_field_order(
        picks in proptest::sample::subsequence(
            vec!["PERS3", "NUMBs", "TENSa", "MOODi", "VOICa", "GENDn", "CASEn", "DEGRp"],
            0..8,
        ),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let mapping = MorphMapping::from_file(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/proiel-morphology.tsv")).unwrap();
        let mut shuffled = picks.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let tag = |v: &[&str]| if v.is_empty() { "_".to_string() } else { v.join("|") };
        let a = convert_morphotag(&tag(&picks), &mapping).unwrap();
        let b = convert_morphotag(&tag(&shuffled), &mapping).unwrap();
        prop_assert_eq!(a.len(), picks.len());
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn predictions_are_trees_and_batch_independent(
        sentences in proptest::collection::vec(sentence_strategy(), 1..5),
        seed in any::<u64>(),
    ) {
        let tb = Treebank::new(sentences);
        let vocab = build_vocab(&tb).unwrap();
        let cfg = ModelConfig { d_char: 4, d_word: 4, d_pos: 3, d_lstm: 4, d_mlp: 4, ..Default::default() };
        let model = ParserModel::<f64>::new(cfg, vocab, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let out = predict(&model, &tb).unwrap();
        for (s, p) in tb.sentences.iter().zip(&out.sentences) {
            prop_assert_eq!(p.tokens.iter().filter(|t| t.head == 0).count(), 1);
            let alone = predict(&model, &Treebank::new(vec![s.clone()])).unwrap();
            prop_assert_eq!(&alone.sentences[0], p);
            let direct = predict_sentence(&model, s).unwrap();
            prop_assert_eq!(direct.heads, p.heads());
        }
    }
}
