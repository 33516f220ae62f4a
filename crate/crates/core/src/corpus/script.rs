//! The thirteen scripts of the benchmark, in their fixed reporting order.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

pub const SCRIPT_COUNT: usize = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Script {
    Arab,
    Ban,
    Guj,
    Gurm,
    Hind,
    Jap,
    Kan,
    Mal,
    Ori,
    Rom,
    Tam,
    Tel,
    Tha,
}

impl Script {
    pub const ALL: [Script; SCRIPT_COUNT] = [
        Script::Arab,
        Script::Ban,
        Script::Guj,
        Script::Gurm,
        Script::Hind,
        Script::Jap,
        Script::Kan,
        Script::Mal,
        Script::Ori,
        Script::Rom,
        Script::Tam,
        Script::Tel,
        Script::Tha,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Script> {
        Script::ALL.get(index).copied()
    }

    pub fn abbrev(self) -> &'static str {
        match self {
            Script::Arab => "Arab",
            Script::Ban => "Ban",
            Script::Guj => "Guj",
            Script::Gurm => "Gurm",
            Script::Hind => "Hind",
            Script::Jap => "Jap",
            Script::Kan => "Kan",
            Script::Mal => "Mal",
            Script::Ori => "Ori",
            Script::Rom => "Rom",
            Script::Tam => "Tam",
            Script::Tel => "Tel",
            Script::Tha => "Tha",
        }
    }

    pub fn full_name(self) -> &'static str {
        match self {
            Script::Arab => "Arabic/Persian",
            Script::Ban => "Bengali",
            Script::Guj => "Gujarati",
            Script::Gurm => "Gurmukhi/Punjabi",
            Script::Hind => "Devanagari",
            Script::Jap => "Japanese",
            Script::Kan => "Kannada",
            Script::Mal => "Malayalam",
            Script::Ori => "Oriya",
            Script::Rom => "Roman",
            Script::Tam => "Tamil",
            Script::Tel => "Telugu",
            Script::Tha => "Thai",
        }
    }

    /// Scripts written without inter-word spaces; their lines are cut into
    /// fixed-size character groups instead of gap-separated words.
    pub fn pseudo_words(self) -> bool {
        matches!(self, Script::Jap | Script::Tha)
    }

    /// Case-insensitive, prefix-tolerant lookup: `"roma"` and `"Rom"` both
    /// resolve to [`Script::Rom`], `"thai"` to [`Script::Tha`].
    pub fn lookup(token: &str) -> Option<Script> {
        let token = token.to_ascii_lowercase();
        if token.is_empty() {
            return None;
        }
        if let Some(&s) = Script::ALL
            .iter()
            .find(|s| s.abbrev().eq_ignore_ascii_case(&token))
        {
            return Some(s);
        }
        // Longest abbreviation the token starts with ("gurmukhi" must not
        // resolve to Guj).
        let by_prefix = Script::ALL
            .iter()
            .filter(|s| token.starts_with(&s.abbrev().to_ascii_lowercase()))
            .max_by_key(|s| s.abbrev().len());
        if let Some(&s) = by_prefix {
            return Some(s);
        }
        if token.len() >= 3 {
            let mut hits = Script::ALL.iter().filter(|s| {
                s.full_name()
                    .to_ascii_lowercase()
                    .split('/')
                    .any(|part| part.starts_with(&token))
            });
            if let (Some(&s), None) = (hits.next(), hits.next()) {
                return Some(s);
            }
        }
        None
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbrev())
    }
}

impl FromStr for Script {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Script::lookup(s).ok_or_else(|| Error::Parse {
            name: s.to_string(),
            token: s.to_string(),
        })
    }
}
