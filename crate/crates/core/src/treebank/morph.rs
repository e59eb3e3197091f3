use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{FeatureSet, TreebankError};

/// Table from positional morphotag codes (`NUMBs`) to UD features (`Number=Sing`).
///
/// Loaded from a tab-separated file with rows `KEY<tab>code<tab>Feature<tab>Value`.
/// A Feature of `_` drops the code from the output.
#[derive(Clone, Debug, Default)]
pub struct MorphMapping {
    table: HashMap<String, HashMap<char, Option<(String, String)>>>,
}

impl MorphMapping {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, TreebankError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| TreebankError::Io {
            path: path.display().to_string(),
            source,
        })?;
        text.parse()
    }

    /// Number of (key, code) entries.
    pub fn len(&self) -> usize {
        self.table.values().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    fn lookup(&self, code: &str) -> Result<Option<(&str, &str)>, TreebankError> {
        let err = |message: String| TreebankError::Morphotag { code: code.to_string(), message };
        let mut chars = code.chars();
        let key: String = chars.by_ref().take(4).collect();
        let value = chars.next();
        if key.chars().count() != 4 || !key.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(err("expected a 4-letter key followed by one value character".into()));
        }
        let (Some(value), None) = (value, chars.next()) else {
            return Err(err("expected exactly one value character after the key".into()));
        };
        let values = self.table.get(&key).ok_or_else(|| err(format!("unknown key `{key}`")))?;
        let mapped = values
            .get(&value)
            .ok_or_else(|| err(format!("unknown value `{value}` for key `{key}`")))?;
        Ok(mapped.as_ref().map(|(f, v)| (f.as_str(), v.as_str())))
    }
}

impl FromStr for MorphMapping {
    type Err = TreebankError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut table: HashMap<String, HashMap<char, Option<(String, String)>>> = HashMap::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| TreebankError::Mapping { line: i + 1, message };
            let cols: Vec<&str> = line.split('\t').collect();
            let [key, code, feat, val] = cols[..] else {
                return Err(err(format!("expected 4 tab-separated columns, found {}", cols.len())));
            };
            if key.len() != 4 || !key.chars().all(|c| c.is_ascii_alphabetic()) {
                return Err(err(format!("key `{key}` is not 4 letters")));
            }
            let mut cs = code.chars();
            let (Some(c), None) = (cs.next(), cs.next()) else {
                return Err(err(format!("code `{code}` is not a single character")));
            };
            let target = if feat == "_" {
                None
            } else {
                if val.is_empty() || feat.is_empty() {
                    return Err(err("empty feature or value".into()));
                }
                Some((feat.to_string(), val.to_string()))
            };
            if table.entry(key.to_string()).or_default().insert(c, target).is_some() {
                return Err(err(format!("duplicate mapping for `{key}{c}`")));
            }
        }
        Ok(MorphMapping { table })
    }
}

/// Converts a positional tag such as `NUMBs|GENDn|CASEn` to UD features.
pub fn convert_morphotag(tag: &str, mapping: &MorphMapping) -> Result<FeatureSet, TreebankError> {
    let mut out = FeatureSet::new();
    if tag == "_" || tag.is_empty() {
        return Ok(out);
    }
    for code in tag.split('|') {
        if let Some((feat, val)) = mapping.lookup(code)? {
            if out.get(feat).is_some() {
                return Err(TreebankError::Morphotag {
                    code: code.to_string(),
                    message: format!("UD feature `{feat}` produced twice"),
                });
            }
            out.insert(feat.to_string(), val.to_string())?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: &str = "# test table\nNUMB\ts\tNumber\tSing\nNUMB\tp\tNumber\tPlur\nGEND\tn\tGender\tNeut\nCASE\tn\tCase\tNom\nINFL\ti\t_\t_\nFLEX\tx\tNumber\tDual\n";

    fn mapping() -> MorphMapping {
        TABLE.parse().unwrap()
    }

    #[test]
    fn known_example() {
        let fs = convert_morphotag("NUMBs|GENDn|CASEn", &mapping()).unwrap();
        assert_eq!(fs.to_string(), "Case=Nom|Gender=Neut|Number=Sing");
    }

    #[test]
    fn order_independent() {
        let m = mapping();
        let a = convert_morphotag("CASEn|NUMBs", &m).unwrap();
        assert_eq!(a.to_string(), "Case=Nom|Number=Sing");
        assert_eq!(a, convert_morphotag("NUMBs|CASEn", &m).unwrap());
    }

    #[test]
    fn underscore_is_empty() {
        assert!(convert_morphotag("_", &mapping()).unwrap().is_empty());
    }

    #[test]
    fn dropped_codes() {
        let fs = convert_morphotag("INFLi|CASEn", &mapping()).unwrap();
        assert_eq!(fs.to_string(), "Case=Nom");
    }

    #[test]
    fn unknown_key_named() {
        let err = convert_morphotag("MOODi", &mapping()).unwrap_err();
        assert!(err.to_string().contains("MOOD"), "{err}");
    }

    #[test]
    fn unknown_value_named() {
        let err = convert_morphotag("CASEz", &mapping()).unwrap_err();
        assert!(err.to_string().contains("CASEz"), "{err}");
    }

    #[test]
    fn duplicate_ud_key() {
        assert!(convert_morphotag("NUMBs|FLEXx", &mapping()).is_err());
    }

    #[test]
    fn malformed_code() {
        assert!(convert_morphotag("NUMB", &mapping()).is_err());
        assert!(convert_morphotag("NUMBss", &mapping()).is_err());
    }

    #[test]
    fn bad_mapping_line() {
        let err = "NUMB\ts\tNumber\n".parse::<MorphMapping>().unwrap_err();
        assert!(matches!(err, TreebankError::Mapping { line: 1, .. }));
    }
}
