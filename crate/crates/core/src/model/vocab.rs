use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::treebank::Treebank;

/// Closed inventories built from training data. Index 0 of the word and
/// character maps is the unknown symbol; everything else is sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "VocabData", into = "VocabData")]
pub struct Vocab {
    words: Vec<String>,
    word_freq: Vec<u32>,
    chars: Vec<char>,
    upos: Vec<String>,
    deprels: Vec<String>,
    word_index: HashMap<String, usize>,
    char_index: HashMap<char, usize>,
    upos_index: HashMap<String, usize>,
    deprel_index: HashMap<String, usize>,
}

#[derive(Clone, Serialize, Deserialize)]
struct VocabData {
    words: Vec<String>,
    word_freq: Vec<u32>,
    chars: Vec<char>,
    upos: Vec<String>,
    deprels: Vec<String>,
}

impl From<VocabData> for Vocab {
    fn from(d: VocabData) -> Self {
        fn index<K: Clone + Eq + std::hash::Hash>(items: &[K], offset: usize) -> HashMap<K, usize> {
            items.iter().enumerate().map(|(i, k)| (k.clone(), i + offset)).collect()
        }
        Vocab {
            word_index: index(&d.words, 1),
            char_index: index(&d.chars, 1),
            upos_index: index(&d.upos, 0),
            deprel_index: index(&d.deprels, 0),
            words: d.words,
            word_freq: d.word_freq,
            chars: d.chars,
            upos: d.upos,
            deprels: d.deprels,
        }
    }
}

impl From<Vocab> for VocabData {
    fn from(v: Vocab) -> Self {
        VocabData { words: v.words, word_freq: v.word_freq, chars: v.chars, upos: v.upos, deprels: v.deprels }
    }
}

pub const UNK: usize = 0;

impl Vocab {
    /// Number of word rows including UNK.
    pub fn n_words(&self) -> usize {
        self.words.len() + 1
    }

    pub fn n_chars(&self) -> usize {
        self.chars.len() + 1
    }

    pub fn n_upos(&self) -> usize {
        self.upos.len()
    }

    pub fn n_deprels(&self) -> usize {
        self.deprels.len()
    }

    pub fn word(&self, form: &str) -> usize {
        self.word_index.get(form).copied().unwrap_or(UNK)
    }

    pub fn char(&self, c: char) -> usize {
        self.char_index.get(&c).copied().unwrap_or(UNK)
    }

    /// Training frequency of a word index; 0 for UNK.
    pub fn freq(&self, word: usize) -> u32 {
        word.checked_sub(1).map_or(0, |i| self.word_freq[i])
    }

    pub fn upos_index(&self, tag: &str) -> Option<usize> {
        self.upos_index.get(tag).copied()
    }

    pub fn deprel_index(&self, rel: &str) -> Option<usize> {
        self.deprel_index.get(rel).copied()
    }

    pub fn upos_name(&self, i: usize) -> &str {
        &self.upos[i]
    }

    pub fn deprel_name(&self, i: usize) -> &str {
        &self.deprels[i]
    }
}

pub fn build_vocab(train: &Treebank) -> Result<Vocab, ModelError> {
    if train.token_count() == 0 {
        return Err(ModelError::EmptyTraining);
    }
    let mut words: BTreeMap<&str, u32> = BTreeMap::new();
    let mut chars = BTreeSet::new();
    let mut upos = BTreeSet::new();
    let mut deprels = BTreeSet::new();
    for t in train.sentences.iter().flat_map(|s| &s.tokens) {
        *words.entry(&t.form).or_default() += 1;
        chars.extend(t.form.chars());
        upos.insert(t.upos.clone());
        deprels.insert(t.deprel.clone());
    }
    Ok(VocabData {
        words: words.keys().map(|w| w.to_string()).collect(),
        word_freq: words.values().copied().collect(),
        chars: chars.into_iter().collect(),
        upos: upos.into_iter().collect(),
        deprels: deprels.into_iter().collect(),
    }
    .into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{Sentence, Token};

    fn tb(forms: &[&str]) -> Treebank {
        Treebank::new(vec![Sentence {
            tokens: forms.iter().enumerate().map(|(i, f)| Token::new(i + 1, *f, "X", i, "dep")).collect(),
            ..Default::default()
        }])
    }

    #[test]
    fn words_and_frequencies() {
        let v = build_vocab(&tb(&["a", "a", "b"])).unwrap();
        assert_eq!(v.n_words(), 3);
        assert_eq!(v.freq(v.word("a")), 2);
        assert_eq!(v.freq(v.word("b")), 1);
        assert_eq!(v.word("unseen"), UNK);
        assert_eq!(v.char('z'), UNK);
        assert_eq!(v.n_chars(), 3);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(build_vocab(&Treebank::default()), Err(ModelError::EmptyTraining)));
    }

    #[test]
    fn serde_round_trip() {
        let v = build_vocab(&tb(&["xy", "z"])).unwrap();
        let back: Vocab = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.word("z"), v.word("z"));
    }
}
