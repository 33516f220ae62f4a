use std::path::PathBuf;

use crate::corpus::{Level, Modality};
use crate::Script;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty-raster")]
    EmptyRaster,

    #[error("blank-image")]
    BlankImage,

    #[error("degenerate-flat-region")]
    DegenerateFlatRegion,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("image too small: {width}x{height} needs at least {min}x{min}")]
    ImageTooSmall { width: usize, height: usize, min: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ill-conditioned: linear system is singular or nearly so (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("training needs at least two distinct scripts, found {found}")]
    InsufficientClasses { found: usize },

    #[error("degenerate folds: {0}")]
    DegenerateFolds(String),

    #[error("cannot parse file name {name:?}: bad token {token:?}")]
    Parse { name: String, token: String },

    #[error("missing samples for {}", format_cells(.0))]
    MissingCells(Vec<(Script, Level, Modality)>),

    #[error("train/test overlap in {script} {level} {modality}: {sample}")]
    SplitOverlap {
        script: Script,
        level: Level,
        modality: Modality,
        sample: String,
    },

    #[error("preset {preset:?} does not apply: {reason}")]
    PresetMismatch { preset: String, reason: String },

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: png decode: {source}")]
    PngDecode {
        path: PathBuf,
        #[source]
        source: png::DecodingError,
    },

    #[error("{path}: png encode: {source}")]
    PngEncode {
        path: PathBuf,
        #[source]
        source: png::EncodingError,
    },
}

fn format_cells(cells: &[(Script, Level, Modality)]) -> String {
    cells
        .iter()
        .map(|(s, l, m)| format!("({s}, {l}, {m})"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
