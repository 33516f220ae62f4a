//! Raster types, binarization, stroke-width estimation, ink equalization and
//! the morphology used by segmentation.

mod binarize;
mod components;
mod ink;
pub mod io;
mod morph;
mod raster;

pub use binarize::{
    binarize, binarize_with, estimate_stroke_width, horizontal_run_lengths, otsu_threshold,
    BinarizeParams, DEFAULT_SENSITIVITY, DEFAULT_WINDOW,
};
pub use components::{connected_components, Component, ComponentSet, Connectivity};
pub use ink::{equalize_ink, gaussian_kernel, ink_field, ink_sigma, INK_WIDTH_MM};
pub use morph::{
    convex_hull, convex_hull_mask, dilate_h, erode_h, fill_component_hulls, fill_convex_hull,
};
pub use raster::{BinaryImage, RasterImage, Rect, DEFAULT_DPI};
