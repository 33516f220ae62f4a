//! `MDSV` binary-model files and multiclass model directories.

use std::path::Path;
use std::sync::Arc;

use super::kernel::{KernelConfig, KernelKind};
use super::lssvm::{BinaryModel, SupportVectors};
use super::ova::MultiModel;
use super::standardize::Standardizer;
use crate::error::{Error, Result};
use crate::features::ExtractorKind;
use crate::Script;

pub const MODEL_MAGIC: &[u8; 4] = b"MDSV";
pub const STANDARDIZER_MAGIC: &[u8; 4] = b"MDST";
pub const MODEL_VERSION: u16 = 1;
pub const STANDARDIZER_FILE: &str = "standardizer.mdst";

const KERNEL_LINEAR: u16 = 1;
const KERNEL_RBF: u16 = 2;

/// Little-endian byte cursor.
struct Reader<'a> {
    what: &'static str,
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(what: &'static str, buf: &'a [u8]) -> Self {
        Self { what, buf, pos: 0 }
    }

    fn err(&self, detail: impl Into<String>) -> Error {
        Error::Format {
            what: self.what,
            detail: detail.into(),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(self.err(format!("truncated at byte {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn header(&mut self, magic: &[u8; 4]) -> Result<()> {
        if self.take(4)? != magic {
            return Err(self.err("bad magic"));
        }
        let v = self.u16()?;
        if v != MODEL_VERSION {
            return Err(self.err(format!("unsupported version {v}")));
        }
        Ok(())
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(self.err("trailing bytes"));
        }
        Ok(())
    }
}

/// Layout: magic, version u16, kernel kind u16, gamma f64, reg f64, script
/// index u16, dim u32, count u32, alphas f64×count, bias f64, support
/// vectors f32×count×dim.
pub fn encode_model(m: &BinaryModel) -> Vec<u8> {
    let (dim, count) = (m.support.dim(), m.support.len());
    let mut out = Vec::with_capacity(40 + 8 * count + 4 * dim * count);
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    let (kind, gamma) = match m.kernel.kind {
        KernelKind::Linear => (KERNEL_LINEAR, 0.0),
        KernelKind::Rbf { gamma } => (KERNEL_RBF, gamma),
    };
    out.extend_from_slice(&kind.to_le_bytes());
    out.extend_from_slice(&gamma.to_le_bytes());
    out.extend_from_slice(&m.kernel.reg.to_le_bytes());
    out.extend_from_slice(&(m.script.index() as u16).to_le_bytes());
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    out.extend_from_slice(&(count as u32).to_le_bytes());
    for a in &m.alphas {
        out.extend_from_slice(&a.to_le_bytes());
    }
    out.extend_from_slice(&m.bias.to_le_bytes());
    for v in m.support.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_model(bytes: &[u8]) -> Result<BinaryModel> {
    let mut r = Reader::new("model file", bytes);
    r.header(MODEL_MAGIC)?;
    let kind = r.u16()?;
    let gamma = r.f64()?;
    let reg = r.f64()?;
    let kernel = match kind {
        KERNEL_LINEAR => KernelConfig::linear(reg),
        KERNEL_RBF => KernelConfig::rbf(gamma, reg),
        other => return Err(r.err(format!("unknown kernel kind {other}"))),
    };
    kernel.validate()?;
    let sid = r.u16()? as usize;
    let script = Script::from_index(sid).ok_or_else(|| r.err(format!("script index {sid}")))?;
    let dim = r.u32()? as usize;
    let count = r.u32()? as usize;
    let alphas = (0..count).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    let bias = r.f64()?;
    let data = (0..count * dim).map(|_| r.f32()).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Ok(BinaryModel {
        script,
        kernel,
        alphas,
        bias,
        support: Arc::new(SupportVectors::new(dim, data)?),
    })
}

/// Layout: magic, version u16, extractor id u16, input dim u32, kept u32,
/// kept indices u32×kept, means f64×kept, stds f64×kept.
pub fn encode_standardizer(kind: ExtractorKind, s: &Standardizer) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(STANDARDIZER_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&kind.file_id().to_le_bytes());
    out.extend_from_slice(&(s.input_dim() as u32).to_le_bytes());
    out.extend_from_slice(&(s.output_dim() as u32).to_le_bytes());
    for &k in s.kept() {
        out.extend_from_slice(&(k as u32).to_le_bytes());
    }
    for v in s.mean().iter().chain(s.std()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_standardizer(bytes: &[u8]) -> Result<(ExtractorKind, Standardizer)> {
    let mut r = Reader::new("standardizer file", bytes);
    r.header(STANDARDIZER_MAGIC)?;
    let id = r.u16()?;
    let kind = ExtractorKind::from_file_id(id).ok_or_else(|| r.err(format!("extractor id {id}")))?;
    let input_dim = r.u32()? as usize;
    let k = r.u32()? as usize;
    let kept = (0..k).map(|_| r.u32().map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
    let mean = (0..k).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    let std = (0..k).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Ok((kind, Standardizer::from_parts(input_dim, kept, mean, std)?))
}

/// Writes `standardizer.mdst` plus one `<Abbrev>.mdsv` per live script.
pub fn save_multi_model(m: &MultiModel, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let p = dir.join(STANDARDIZER_FILE);
    std::fs::write(&p, encode_standardizer(m.kind, &m.standardizer)).map_err(|e| Error::io(&p, e))?;
    for s in Script::ALL {
        let p = dir.join(format!("{}.mdsv", s.abbrev()));
        match m.model(s) {
            Some(b) => std::fs::write(&p, encode_model(b)).map_err(|e| Error::io(&p, e))?,
            None if p.exists() => std::fs::remove_file(&p).map_err(|e| Error::io(&p, e))?,
            None => {}
        }
    }
    Ok(())
}

pub fn load_multi_model(dir: &Path) -> Result<MultiModel> {
    let p = dir.join(STANDARDIZER_FILE);
    let bytes = std::fs::read(&p).map_err(|e| Error::io(&p, e))?;
    let (kind, standardizer) = decode_standardizer(&bytes)?;
    let mut models = Vec::with_capacity(Script::ALL.len());
    for s in Script::ALL {
        let p = dir.join(format!("{}.mdsv", s.abbrev()));
        if !p.exists() {
            models.push(None);
            continue;
        }
        let bytes = std::fs::read(&p).map_err(|e| Error::io(&p, e))?;
        let m = decode_model(&bytes)?;
        if m.script != s || m.support.dim() != standardizer.output_dim() {
            return Err(Error::Format {
                what: "model directory",
                detail: format!("{} does not match its slot", p.display()),
            });
        }
        models.push(Some(m));
    }
    MultiModel::from_models(kind, standardizer, models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{predict, train_ova};

    fn toy() -> MultiModel {
        let x: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![(i % 3) as f64 + 0.01 * i as f64, 1.0, (i / 3) as f64 * 0.1])
            .collect();
        let y: Vec<Script> = (0..12).map(|i| Script::ALL[i % 3]).collect();
        train_ova(ExtractorKind::Hot200, &x, &y, KernelConfig::rbf(0.5, 10.0)).unwrap()
    }

    #[test]
    fn model_bytes_roundtrip() {
        let m = toy();
        let b = m.model(Script::Ban).unwrap();
        let bytes = encode_model(b);
        assert_eq!(&bytes[..6], b"MDSV\x01\x00");
        let back = decode_model(&bytes).unwrap();
        assert_eq!(encode_model(&back), bytes);
        assert!(decode_model(&bytes[..bytes.len() - 2]).is_err());
    }

    #[test]
    fn directory_roundtrip_preserves_scores() {
        let m = toy();
        let dir = tempfile::tempdir().unwrap();
        save_multi_model(&m, dir.path()).unwrap();
        assert!(dir.path().join("Arab.mdsv").exists());
        assert!(!dir.path().join("Tha.mdsv").exists());
        let back = load_multi_model(dir.path()).unwrap();
        assert_eq!(back.kind(), ExtractorKind::Hot200);
        assert_eq!(back.live_scripts(), m.live_scripts());
        let q = [1.2, 1.0, 0.3];
        assert_eq!(predict(&m, &q).unwrap(), predict(&back, &q).unwrap());
    }
}
