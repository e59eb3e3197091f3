use std::fmt;
use std::str::FromStr;

use super::TreebankError;

/// Morphological features of a token, kept sorted case-insensitively by key.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FeatureSet {
    pairs: Vec<(String, String)>,
}

fn sort_key(key: &str) -> (String, &str) {
    (key.to_lowercase(), key)
}

impl FeatureSet {
    pub fn new() -> Self {
        FeatureSet::default()
    }

    /// Build a set from pairs, rejecting duplicate keys.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self, TreebankError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut set = FeatureSet::new();
        for (k, v) in pairs {
            set.insert(k.into(), v.into())?;
        }
        Ok(set)
    }

    /// Insert a feature. Fails if the key is already present.
    pub fn insert(&mut self, key: String, value: String) -> Result<(), TreebankError> {
        if key.is_empty() || value.is_empty() {
            return Err(TreebankError::Feature(format!(
                "empty key or value in feature `{key}={value}`"
            )));
        }
        match self
            .pairs
            .binary_search_by(|(k, _)| sort_key(k).cmp(&sort_key(&key)))
        {
            Ok(_) => Err(TreebankError::Feature(format!("duplicate feature key `{key}`"))),
            Err(pos) => {
                self.pairs.insert(pos, (key, value));
                Ok(())
            }
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl FromStr for FeatureSet {
    type Err = TreebankError;

    /// Parses `Key=Value|Key=Value`, or `_` for the empty set.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = FeatureSet::new();
        if s == "_" || s.is_empty() {
            return Ok(set);
        }
        for part in s.split('|') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| TreebankError::Feature(format!("feature `{part}` lacks `=`")))?;
            set.insert(k.to_string(), v.to_string())?;
        }
        Ok(set)
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return f.write_str("_");
        }
        for (i, (k, v)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
