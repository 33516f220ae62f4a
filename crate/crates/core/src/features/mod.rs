//! Texture descriptors: zoned LBP, quad-tree histogram of templates and
//! dense multi-block LBP.

mod dct;
pub mod format;
mod hot;
mod lbp;
mod mblbp;
mod registry;
mod vector;

pub use dct::dct2;
pub use hot::{
    equi_mass_split, hot_counts, hot_region, quadtree_cells, quadtree_hot, sobel_magnitude_sq,
    TemplateSet, HOT_REGION_DIM, TEMPLATE_COUNT,
};
pub use lbp::{
    lbp_feature, lbp_histogram, lbp_map, lbp_zones, LbpMap, FLAT_CODE, LBP_BINS, NEIGHBORS,
};
pub use mblbp::{dense_mblbp_feature, mblbp_histogram, mblbp_map, DenseMbLbp, MBLBP_BINS};
pub use registry::{ExtractorRegistry, FeatureExtractor, QuadTreeHot, ZonedLbp};
pub use vector::{ExtractorKind, FeatureVector};
