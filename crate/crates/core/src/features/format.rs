//! `MDFV` feature files and their CSV label sidecar.

use std::io::{BufRead, Read, Write};

use super::vector::{ExtractorKind, FeatureVector};
use crate::corpus::{Level, Modality};
use crate::error::{Error, Result};
use crate::Script;

pub const MAGIC: &[u8; 4] = b"MDFV";
pub const VERSION: u16 = 1;
pub const LABEL_HEADER: &str = "sample_id,script,level,modality";

/// Decoded feature file. Values are stored as `f32`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub kind: ExtractorKind,
    pub rows: Vec<Vec<f32>>,
}

fn format_err(detail: impl Into<String>) -> Error {
    Error::Format {
        what: "feature file",
        detail: detail.into(),
    }
}

pub fn write_features<W: Write>(mut out: W, kind: ExtractorKind, vectors: &[FeatureVector]) -> std::io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&kind.file_id().to_le_bytes())?;
    out.write_all(&(kind.dim() as u32).to_le_bytes())?;
    out.write_all(&(vectors.len() as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(kind.dim() * 4);
    for v in vectors {
        assert_eq!(v.kind(), kind, "mixed extractor kinds in one feature file");
        buf.clear();
        for &x in v.values() {
            buf.extend_from_slice(&(x as f32).to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    out.flush()
}

pub fn read_features<R: Read>(mut input: R) -> Result<FeatureMatrix> {
    let mut header = [0u8; 16];
    input
        .read_exact(&mut header)
        .map_err(|_| format_err("truncated header"))?;
    if &header[..4] != MAGIC {
        return Err(format_err("bad magic"));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != VERSION {
        return Err(format_err(format!("unsupported version {version}")));
    }
    let id = u16::from_le_bytes([header[6], header[7]]);
    let kind = ExtractorKind::from_file_id(id).ok_or_else(|| format_err(format!("unknown extractor id {id}")))?;
    let dim = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    if dim != kind.dim() {
        return Err(format_err(format!("dimension {dim} does not match {kind}")));
    }
    let count = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
    let mut rows = Vec::with_capacity(count);
    let mut buf = vec![0u8; dim * 4];
    for i in 0..count {
        input
            .read_exact(&mut buf)
            .map_err(|_| format_err(format!("truncated at vector {i} of {count}")))?;
        rows.push(
            buf.chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        );
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest).map_err(|e| format_err(e.to_string()))? != 0 {
        return Err(format_err("trailing bytes"));
    }
    Ok(FeatureMatrix { kind, rows })
}

/// One row of the label sidecar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelRecord {
    pub sample_id: String,
    pub script: Script,
    pub level: Level,
    pub modality: Modality,
}

pub fn write_labels<W: Write>(mut out: W, labels: &[LabelRecord]) -> std::io::Result<()> {
    writeln!(out, "{LABEL_HEADER}")?;
    for l in labels {
        writeln!(out, "{},{},{},{}", l.sample_id, l.script.abbrev(), l.level, l.modality)?;
    }
    out.flush()
}

pub fn read_labels<R: BufRead>(input: R) -> Result<Vec<LabelRecord>> {
    let err = |detail: String| Error::Format {
        what: "label file",
        detail,
    };
    let mut lines = input.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim_end() == LABEL_HEADER => {}
        _ => return Err(err("missing header".into())),
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| err(e.to_string()))?;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(err(format!("line {}: expected 4 fields", n + 2)));
        }
        out.push(LabelRecord {
            sample_id: f[0].to_string(),
            script: f[1].parse()?,
            level: f[2].parse()?,
            modality: f[3].parse()?,
        });
    }
    Ok(out)
}
