//! LS-SVM training, one-vs-all multiclass models, grid search and score
//! fusion.

mod grid;
pub mod io;
mod kernel;
mod lssvm;
mod ova;
mod standardize;

pub use grid::{fold_split, grid_search, Grid, KernelFamily};
pub use io::{load_multi_model, save_multi_model};
pub use kernel::{kernel, KernelConfig, KernelKind};
pub use lssvm::{train_lssvm, BinaryModel, LsSvmSystem, PairTable, SupportVectors};
pub use ova::{fuse_scores, predict, predict_many, train_ova, train_ova_search, MultiModel, ScoreVector};
pub use standardize::Standardizer;
