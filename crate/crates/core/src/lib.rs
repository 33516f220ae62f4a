//! Script identification benchmark toolkit.
//!
//! The crate covers the whole handcrafted pipeline for multi-script document
//! images: background/ink normalization, line and word segmentation, three
//! texture descriptors (zoned LBP, quad-tree histogram of templates and dense
//! multi-block LBP), one-vs-all LS-SVM classification with score fusion, and
//! an evaluation harness that produces hit ratios, confusion matrices and
//! cumulative match curves.

pub mod bench;
pub mod classify;
pub mod corpus;
pub mod error;
pub mod features;
pub mod imagecore;
pub mod segmentation;

pub use corpus::script::{Script, SCRIPT_COUNT};
pub use error::{Error, Result};
