use std::collections::BTreeMap;
use std::sync::Arc;

use super::hot::{quadtree_hot, TemplateSet};
use super::lbp::lbp_feature;
use super::mblbp::DenseMbLbp;
use super::vector::{ExtractorKind, FeatureVector};
use crate::error::{Error, Result};
use crate::imagecore::{BinaryImage, RasterImage};

/// A descriptor computed from a preprocessed image and its ink mask.
pub trait FeatureExtractor: Send + Sync {
    fn kind(&self) -> ExtractorKind;
    fn extract(&self, img: &RasterImage, fg: &BinaryImage) -> Result<FeatureVector>;
}

pub struct ZonedLbp;

impl FeatureExtractor for ZonedLbp {
    fn kind(&self) -> ExtractorKind {
        ExtractorKind::Lbp255
    }

    fn extract(&self, img: &RasterImage, fg: &BinaryImage) -> Result<FeatureVector> {
        lbp_feature(img, fg)
    }
}

pub struct QuadTreeHot {
    pub templates: TemplateSet,
}

impl FeatureExtractor for QuadTreeHot {
    fn kind(&self) -> ExtractorKind {
        ExtractorKind::Hot200
    }

    fn extract(&self, img: &RasterImage, fg: &BinaryImage) -> Result<FeatureVector> {
        quadtree_hot(img, fg, &self.templates)
    }
}

impl FeatureExtractor for DenseMbLbp {
    fn kind(&self) -> ExtractorKind {
        ExtractorKind::Dmb10240
    }

    fn extract(&self, img: &RasterImage, fg: &BinaryImage) -> Result<FeatureVector> {
        FeatureVector::new(ExtractorKind::Dmb10240, DenseMbLbp::extract(self, img, fg)?)
    }
}

/// Extractors by name.
#[derive(Clone, Default)]
pub struct ExtractorRegistry {
    entries: BTreeMap<String, Arc<dyn FeatureExtractor>>,
}

impl ExtractorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `lbp`, `hot` and `dmb` with their default parameters.
    pub fn standard() -> Self {
        let mut r = Self::new();
        r.register(ZonedLbp);
        r.register(QuadTreeHot {
            templates: TemplateSet::standard(),
        });
        r.register(DenseMbLbp::standard());
        r
    }

    /// Registers under the kind's name, replacing any previous entry.
    pub fn register<E: FeatureExtractor + 'static>(&mut self, extractor: E) {
        let name = extractor.kind().name().to_string();
        self.entries.insert(name, Arc::new(extractor));
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn FeatureExtractor>> {
        let key = name
            .parse::<ExtractorKind>()
            .map(|k| k.name().to_string())
            .unwrap_or_else(|_| name.to_string());
        self.entries.get(&key).cloned().ok_or_else(|| Error::Format {
            what: "extractor",
            detail: format!("{name} is not registered"),
        })
    }

    pub fn by_kind(&self, kind: ExtractorKind) -> Result<Arc<dyn FeatureExtractor>> {
        self.get(kind.name())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_registry_resolves_aliases() {
        let r = ExtractorRegistry::standard();
        assert_eq!(r.names().collect::<Vec<_>>(), ["dmb", "hot", "lbp"]);
        assert_eq!(r.get("HOT200").unwrap().kind(), ExtractorKind::Hot200);
        assert!(r.get("sift").is_err());
    }

    #[test]
    fn every_extractor_honours_its_dimension() {
        let img = RasterImage::from_fn(40, 24, |x, y| ((x * 7 + y * 13) % 256) as u8).unwrap();
        let fg = BinaryImage::from_fn(40, 24, |x, y| (x + 2 * y) % 5 < 2).unwrap();
        let r = ExtractorRegistry::standard();
        for kind in ExtractorKind::ALL {
            let f = r.by_kind(kind).unwrap().extract(&img, &fg).unwrap();
            assert_eq!(f.kind(), kind);
            assert_eq!(f.values().len(), kind.dim());
        }
    }
}
