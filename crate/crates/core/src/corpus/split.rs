use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::CorpusError;
use crate::treebank::{Sentence, Treebank};

/// Texts with fewer tokens than this are used for training only.
pub const MIN_RATIO_TOKENS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios { train: 0.8, dev: 0.1, test: 0.1 }
    }
}

/// How sentences are ordered before the cumulative thresholds are applied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitStrategy {
    /// Contiguous spans in document order.
    #[default]
    Contiguous,
    /// Seeded shuffle of sentences; each section keeps document order.
    Shuffled { seed: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub total_tokens: usize,
    pub train_tokens: usize,
    pub dev_tokens: usize,
    pub test_tokens: usize,
    /// Set when the text was below the ratio threshold.
    pub train_only: bool,
    /// Exact token targets the sentence boundaries approximate.
    pub target_train: f64,
    pub target_dev: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SplitResult {
    pub train: Treebank,
    pub dev: Treebank,
    pub test: Treebank,
    pub report: SplitReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    Train,
    Dev,
    Test,
}

impl Section {
    pub const ALL: [Section; 3] = [Section::Train, Section::Dev, Section::Test];

    pub fn name(self) -> &'static str {
        match self {
            Section::Train => "train",
            Section::Dev => "dev",
            Section::Test => "test",
        }
    }
}

impl SplitResult {
    pub fn section(&self, s: Section) -> &Treebank {
        match s {
            Section::Train => &self.train,
            Section::Dev => &self.dev,
            Section::Test => &self.test,
        }
    }

    pub fn into_section(self, s: Section) -> Treebank {
        match s {
            Section::Train => self.train,
            Section::Dev => self.dev,
            Section::Test => self.test,
        }
    }
}

/// Splits one text into train/dev/test on sentence boundaries.
///
/// Train takes sentences until its cumulative token count first reaches
/// `train` of the total, dev until the running count reaches `train + dev`,
/// and test gets the rest.
pub fn split_text(
    tb: &Treebank,
    ratios: SplitRatios,
    min_ratio_tokens: usize,
    strategy: SplitStrategy,
) -> Result<SplitResult, CorpusError> {
    if tb.is_empty() {
        return Err(CorpusError::EmptyText);
    }
    let sum = ratios.train + ratios.dev + ratios.test;
    if (sum - 1.0).abs() > 1e-9 || [ratios.train, ratios.dev, ratios.test].iter().any(|r| *r < 0.0) {
        return Err(CorpusError::Ratios(sum));
    }
    let total = tb.token_count();
    let target_train = ratios.train * total as f64;
    let target_dev = (ratios.train + ratios.dev) * total as f64;
    let mut report = SplitReport { total_tokens: total, target_train, target_dev, ..Default::default() };

    if total < min_ratio_tokens {
        report.train_only = true;
        report.train_tokens = total;
        return Ok(SplitResult { train: tb.clone(), report, ..Default::default() });
    }

    let mut order: Vec<usize> = (0..tb.len()).collect();
    if let SplitStrategy::Shuffled { seed } = strategy {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }

    let slack = 1e-9 * total as f64;
    let mut section_of = vec![Section::Test; tb.len()];
    let mut cum = 0usize;
    let mut current = Section::Train;
    for &i in &order {
        // Boundaries are checked before adding, so a section closes on the
        // sentence that first reaches its threshold.
        if current == Section::Train && cum as f64 >= target_train - slack {
            current = Section::Dev;
        }
        if current == Section::Dev && cum as f64 >= target_dev - slack {
            current = Section::Test;
        }
        section_of[i] = current;
        cum += tb.sentences[i].len();
    }

    let mut out = SplitResult { report, ..Default::default() };
    for (i, s) in tb.sentences.iter().enumerate() {
        let dest: &mut Vec<Sentence> = match section_of[i] {
            Section::Train => &mut out.train.sentences,
            Section::Dev => &mut out.dev.sentences,
            Section::Test => &mut out.test.sentences,
        };
        dest.push(s.clone());
    }
    out.report.train_tokens = out.train.token_count();
    out.report.dev_tokens = out.dev.token_count();
    out.report.test_tokens = out.test.token_count();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::Token;
    use proptest::prelude::*;

    pub(crate) fn text_with_sizes(sizes: &[usize]) -> Treebank {
        sizes
            .iter()
            .enumerate()
            .map(|(si, &n)| Sentence {
                comments: vec![format!("# sent_id = {si}")],
                tokens: (1..=n).map(|i| Token::new(i, format!("w{i}"), "X", i - 1, "dep")).collect(),
                ..Default::default()
            })
            .collect()
    }

    fn ids(tb: &Treebank) -> Vec<String> {
        tb.sentences.iter().map(|s| s.sent_id().unwrap().to_string()).collect()
    }

    #[test]
    fn hundred_by_ten() {
        let tb = text_with_sizes(&[10; 100]);
        let r = split_text(&tb, SplitRatios::default(), MIN_RATIO_TOKENS, SplitStrategy::Contiguous).unwrap();
        assert_eq!((r.train.len(), r.dev.len(), r.test.len()), (80, 10, 10));
    }

    #[test]
    fn small_text_train_only() {
        // kiev-mis has 370 tokens
        let tb = text_with_sizes(&[37; 10]);
        let r = split_text(&tb, SplitRatios::default(), MIN_RATIO_TOKENS, SplitStrategy::Contiguous).unwrap();
        assert_eq!((r.report.train_tokens, r.report.dev_tokens, r.report.test_tokens), (370, 0, 0));
        assert!(r.report.train_only);
    }

    #[test]
    fn exactly_at_threshold_is_split() {
        let tb = text_with_sizes(&[40; 10]);
        let r = split_text(&tb, SplitRatios::default(), MIN_RATIO_TOKENS, SplitStrategy::Contiguous).unwrap();
        assert!(!r.report.train_only);
        assert_eq!((r.train.len(), r.dev.len(), r.test.len()), (8, 1, 1));
    }

    #[test]
    fn uneven_sentences() {
        // cumulative 100,200,300,400 | 450 | 480,500 against 400 and 450
        let tb = text_with_sizes(&[100, 100, 100, 100, 50, 30, 20]);
        let r = split_text(&tb, SplitRatios::default(), MIN_RATIO_TOKENS, SplitStrategy::Contiguous).unwrap();
        assert_eq!(ids(&r.train), ["0", "1", "2", "3"]);
        assert_eq!(ids(&r.dev), ["4"]);
        assert_eq!(ids(&r.test), ["5", "6"]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            split_text(&Treebank::default(), SplitRatios::default(), 400, SplitStrategy::Contiguous),
            Err(CorpusError::EmptyText)
        ));
        let bad = SplitRatios { train: 0.8, dev: 0.1, test: 0.2 };
        assert!(matches!(
            split_text(&text_with_sizes(&[5]), bad, 400, SplitStrategy::Contiguous),
            Err(CorpusError::Ratios(_))
        ));
    }

    #[test]
    fn shuffled_is_seeded_and_order_preserving() {
        let tb = text_with_sizes(&[10; 50]);
        let s = SplitStrategy::Shuffled { seed: 7 };
        let a = split_text(&tb, SplitRatios::default(), 400, s).unwrap();
        let b = split_text(&tb, SplitRatios::default(), 400, s).unwrap();
        assert_eq!(a, b);
        let train_ids: Vec<usize> = ids(&a.train).iter().map(|x| x.parse().unwrap()).collect();
        assert!(train_ids.windows(2).all(|w| w[0] < w[1]));
        assert_ne!(train_ids, (0..40).collect::<Vec<_>>());
        assert_eq!((a.train.len(), a.dev.len(), a.test.len()), (40, 5, 5));
    }

    proptest! {
        #[test]
        fn partition_and_threshold_bounds(sizes in proptest::collection::vec(1usize..40, 1..80)) {
            let tb = text_with_sizes(&sizes);
            let r = split_text(&tb, SplitRatios::default(), 0, SplitStrategy::Contiguous).unwrap();
            let mut all = ids(&r.train);
            all.extend(ids(&r.dev));
            all.extend(ids(&r.test));
            prop_assert_eq!(all, ids(&tb));
            let total = tb.token_count() as f64;
            let max_len = *sizes.iter().max().unwrap() as f64;
            let train = r.report.train_tokens as f64;
            let train_dev = train + r.report.dev_tokens as f64;
            prop_assert!(train >= 0.8 * total - 1e-6);
            prop_assert!(train <= 0.8 * total + max_len + 1e-6);
            prop_assert!(train_dev >= 0.9 * total - 1e-6);
            prop_assert!(train_dev <= 0.9 * total + max_len + 1e-6);
        }
    }
}
