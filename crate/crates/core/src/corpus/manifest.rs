use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CorpusError;

/// Pre-modern Slavic varieties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variety {
    OCS,
    SCS,
    RCS,
    OES,
    MRus,
    ONov,
}

impl Variety {
    pub const ALL: [Variety; 6] = [
        Variety::OCS,
        Variety::SCS,
        Variety::RCS,
        Variety::OES,
        Variety::MRus,
        Variety::ONov,
    ];

    pub fn macro_area(self) -> MacroArea {
        match self {
            Variety::OCS | Variety::SCS | Variety::RCS => MacroArea::SouthSlavic,
            Variety::OES | Variety::MRus | Variety::ONov => MacroArea::EastSlavic,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variety::OCS => "OCS",
            Variety::SCS => "SCS",
            Variety::RCS => "RCS",
            Variety::OES => "OES",
            Variety::MRus => "MRus",
            Variety::ONov => "ONov",
        }
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MacroArea {
    #[serde(rename = "south")]
    SouthSlavic,
    #[serde(rename = "east")]
    EastSlavic,
}

impl fmt::Display for MacroArea {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MacroArea::SouthSlavic => "South Slavic",
            MacroArea::EastSlavic => "East Slavic",
        })
    }
}

/// Which texts go into a dataset: the SSL, ESL, and GEN training regimes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DatasetFilter {
    /// South Slavic only.
    SSL,
    /// East Slavic only.
    ESL,
    /// Both macro-areas.
    GEN,
}

impl DatasetFilter {
    pub fn matches(self, area: MacroArea) -> bool {
        match self {
            DatasetFilter::SSL => area == MacroArea::SouthSlavic,
            DatasetFilter::ESL => area == MacroArea::EastSlavic,
            DatasetFilter::GEN => true,
        }
    }
}

impl FromStr for DatasetFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "SSL" | "SOUTH" => Ok(DatasetFilter::SSL),
            "ESL" | "EAST" => Ok(DatasetFilter::ESL),
            "GEN" | "ALL" => Ok(DatasetFilter::GEN),
            _ => Err(format!("unknown filter `{s}` (expected SSL, ESL, or GEN)")),
        }
    }
}

impl fmt::Display for DatasetFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    /// 80/10/10 by cumulative token share.
    Ratio,
    /// Use existing train/dev/test files.
    Predefined,
    /// Whole text goes to training.
    TrainOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredefinedPaths {
    pub train: PathBuf,
    pub dev: PathBuf,
    pub test: PathBuf,
}

/// One text of the corpus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextManifest {
    pub label: String,
    pub variety: Variety,
    pub macro_area: MacroArea,
    /// Whole-text CoNLL-U file. Optional for predefined texts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub split_mode: SplitMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predefined: Option<PredefinedPaths>,
    /// Published token count, for cross-checking.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<usize>,
}

impl TextManifest {
    fn check(&self) -> Result<(), CorpusError> {
        let bad = |message: String| CorpusError::Manifest { label: self.label.clone(), message };
        if self.label.is_empty() {
            return Err(bad("empty label".into()));
        }
        if self.variety.macro_area() != self.macro_area {
            return Err(bad(format!(
                "variety {} belongs to {}, not {}",
                self.variety,
                self.variety.macro_area(),
                self.macro_area
            )));
        }
        match self.split_mode {
            SplitMode::Predefined if self.predefined.is_none() => {
                Err(bad("split_mode predefined requires train/dev/test paths".into()))
            }
            SplitMode::Ratio | SplitMode::TrainOnly if self.path.is_none() => {
                Err(bad("missing path".into()))
            }
            _ => Ok(()),
        }
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.path.as_mut() {
            join(p);
        }
        if let Some(pre) = self.predefined.as_mut() {
            join(&mut pre.train);
            join(&mut pre.dev);
            join(&mut pre.test);
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct ManifestFile {
    #[serde(default, rename = "text")]
    texts: Vec<TextManifest>,
}

/// An ordered list of texts with unique labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub texts: Vec<TextManifest>,
}

impl Manifest {
    pub fn new(texts: Vec<TextManifest>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for t in &texts {
            t.check()?;
            if !seen.insert(t.label.as_str()) {
                return Err(CorpusError::DuplicateLabel(t.label.clone()));
            }
        }
        Ok(Manifest { texts })
    }

    /// Parses a TOML manifest; relative paths are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, CorpusError> {
        let file: ManifestFile =
            toml::from_str(text).map_err(|e| CorpusError::Format(e.to_string()))?;
        let mut texts = file.texts;
        for t in &mut texts {
            t.resolve(base_dir);
        }
        Manifest::new(texts)
    }

    /// Loads a manifest file. Relative paths resolve against `data_dir` when
    /// given, else against the manifest's own directory.
    pub fn load(path: impl AsRef<Path>, data_dir: Option<&Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            label: "<manifest>".into(),
            path: path.to_path_buf(),
            source,
        })?;
        let base = match data_dir {
            Some(d) => d.to_path_buf(),
            None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        Manifest::parse(&text, &base)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&ManifestFile { texts: self.texts.clone() }).expect("manifest serializes")
    }

    pub fn get(&self, label: &str) -> Option<&TextManifest> {
        self.texts.iter().find(|t| t.label == label)
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }
}
