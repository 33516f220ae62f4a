//! Script registry, file naming, manifests and the synthetic corpus generator.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

pub mod manifest;
pub mod naming;
pub mod script;
pub mod synth;

pub use manifest::{build_manifest, CellCounts, Manifest, ManifestRecord, ManifestScan};
pub use naming::{parse_name, SampleName};
pub use synth::{synth_corpus, SynthSpec};

/// Sample granularity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Doc,
    Line,
    Word,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Doc, Level::Line, Level::Word];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Doc => "doc",
            Level::Line => "line",
            Level::Word => "word",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "doc" | "docs" | "document" | "documents" => Ok(Level::Doc),
            "line" | "lines" => Ok(Level::Line),
            "word" | "words" => Ok(Level::Word),
            _ => Err(Error::Format {
                what: "level",
                detail: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modality {
    Handwritten,
    Printed,
}

impl Modality {
    pub const ALL: [Modality; 2] = [Modality::Handwritten, Modality::Printed];

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Handwritten => "handwritten",
            Modality::Printed => "printed",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "handwritten" | "hw" => Ok(Modality::Handwritten),
            "printed" | "pr" => Ok(Modality::Printed),
            _ => Err(Error::Format {
                what: "modality",
                detail: s.to_string(),
            }),
        }
    }
}
