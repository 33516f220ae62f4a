//! `script_xxx[_yyy[_zzz]].png` file names.

use std::fmt;

use super::Level;
use crate::error::{Error, Result};
use crate::Script;

/// Identity of one sample as encoded in its file name: document, optional
/// line within the document, optional word within the line. Indices start at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SampleName {
    pub script: Script,
    pub doc: u32,
    pub line: Option<u32>,
    pub word: Option<u32>,
}

impl SampleName {
    pub fn doc(script: Script, doc: u32) -> Self {
        Self {
            script,
            doc,
            line: None,
            word: None,
        }
    }

    pub fn line(script: Script, doc: u32, line: u32) -> Self {
        Self {
            script,
            doc,
            line: Some(line),
            word: None,
        }
    }

    pub fn word(script: Script, doc: u32, line: u32, word: u32) -> Self {
        Self {
            script,
            doc,
            line: Some(line),
            word: Some(word),
        }
    }

    pub fn level(&self) -> Level {
        match (self.line, self.word) {
            (None, _) => Level::Doc,
            (Some(_), None) => Level::Line,
            (Some(_), Some(_)) => Level::Word,
        }
    }

    /// Canonical file name, e.g. `Rom_004_012_004.png`.
    pub fn file_name(&self) -> String {
        format!("{self}.png")
    }
}

impl fmt::Display for SampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{:03}", self.script.abbrev(), self.doc)?;
        if let Some(l) = self.line {
            write!(f, "_{l:03}")?;
        }
        if let Some(w) = self.word {
            write!(f, "_{w:03}")?;
        }
        Ok(())
    }
}

/// Parses a base name such as `roma_004_012_004.png`. The script token is
/// matched case-insensitively and by prefix; each index must be three or more
/// decimal digits.
pub fn parse_name(file_name: &str) -> Result<SampleName> {
    let err = |token: &str| Error::Parse {
        name: file_name.to_string(),
        token: token.to_string(),
    };
    let base = std::path::Path::new(file_name)
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or(file_name);
    let stem = match base.rsplit_once('.') {
        Some((stem, ext)) if ext.eq_ignore_ascii_case("png") => stem,
        Some((_, ext)) => return Err(err(ext)),
        None => return Err(err(base)),
    };
    let mut parts = stem.split('_');
    let script_token = parts.next().unwrap_or_default();
    let script = Script::lookup(script_token).ok_or_else(|| err(script_token))?;
    let mut indices = Vec::with_capacity(3);
    for token in parts {
        if token.len() < 3 || !token.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err(token));
        }
        let v: u32 = token.parse().map_err(|_| err(token))?;
        if v == 0 {
            return Err(err(token));
        }
        indices.push(v);
    }
    match indices[..] {
        [doc] => Ok(SampleName::doc(script, doc)),
        [doc, line] => Ok(SampleName::line(script, doc, line)),
        [doc, line, word] => Ok(SampleName::word(script, doc, line, word)),
        [] => Err(err(stem)),
        _ => Err(err(stem)),
    }
}
