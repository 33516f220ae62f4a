use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Identity of a descriptor; fixes its dimension and file id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtractorKind {
    Lbp255,
    Hot200,
    Dmb10240,
}

impl ExtractorKind {
    pub const ALL: [ExtractorKind; 3] = [
        ExtractorKind::Lbp255,
        ExtractorKind::Hot200,
        ExtractorKind::Dmb10240,
    ];

    pub fn dim(self) -> usize {
        match self {
            ExtractorKind::Lbp255 => 255,
            ExtractorKind::Hot200 => 200,
            ExtractorKind::Dmb10240 => 10_240,
        }
    }

    /// Id used in feature and model files.
    pub fn file_id(self) -> u16 {
        match self {
            ExtractorKind::Lbp255 => 1,
            ExtractorKind::Hot200 => 2,
            ExtractorKind::Dmb10240 => 3,
        }
    }

    pub fn from_file_id(id: u16) -> Option<Self> {
        ExtractorKind::ALL.into_iter().find(|k| k.file_id() == id)
    }

    /// Registry name.
    pub fn name(self) -> &'static str {
        match self {
            ExtractorKind::Lbp255 => "lbp",
            ExtractorKind::Hot200 => "hot",
            ExtractorKind::Dmb10240 => "dmb",
        }
    }
}

impl fmt::Display for ExtractorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExtractorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lbp" | "lbp255" => Ok(ExtractorKind::Lbp255),
            "hot" | "hot200" | "quadtree" => Ok(ExtractorKind::Hot200),
            "dmb" | "dmb10240" | "dense" => Ok(ExtractorKind::Dmb10240),
            _ => Err(Error::Format {
                what: "extractor",
                detail: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    kind: ExtractorKind,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(kind: ExtractorKind, values: Vec<f64>) -> Result<Self> {
        if values.len() != kind.dim() {
            return Err(Error::DimensionMismatch {
                expected: kind.dim(),
                actual: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite feature value {bad}")));
        }
        Ok(Self { kind, values })
    }

    pub fn zeros(kind: ExtractorKind) -> Self {
        Self {
            kind,
            values: vec![0.0; kind.dim()],
        }
    }

    pub fn kind(&self) -> ExtractorKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}
