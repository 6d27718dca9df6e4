//! Title keys: the `Title (YYYY)` strings that link every list file together.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Earliest year accepted in a title key.
pub const MIN_YEAR: u16 = 1870;
/// Latest year accepted in a title key.
pub const MAX_YEAR: u16 = 2100;

/// A movie identity: title text plus production year, with an optional roman
/// numeral separating same-titled releases from the same year.
///
/// The rendered form is `Title (YYYY)`, `Title (YYYY/II)` or `Title (????)`
/// when the year is unknown. Parsing a well-formed key and rendering it back
/// reproduces the input byte for byte.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TitleKey {
    pub title: String,
    pub year: Option<u16>,
    pub numeral: Option<String>,
}

impl TitleKey {
    pub fn new(title: impl Into<String>, year: Option<u16>) -> Self {
        TitleKey {
            title: title.into(),
            year,
            numeral: None,
        }
    }

    /// Parse the canonical rendered form. Returns `None` for anything that
    /// does not end in a `(year)` group, carries an out-of-range year, or
    /// embeds control characters in the title.
    pub fn parse(text: &str) -> Option<TitleKey> {
        let open = text.rfind(" (")?;
        let (title, tail) = text.split_at(open);
        if title.is_empty() || title.contains('\t') || title.contains('\n') {
            return None;
        }
        let inner = tail.strip_prefix(" (")?.strip_suffix(')')?;
        let (year_part, numeral) = match inner.split_once('/') {
            Some((y, n)) => {
                if n.is_empty() || !n.chars().all(|c| "IVXLCDM".contains(c)) {
                    return None;
                }
                (y, Some(n.to_string()))
            }
            None => (inner, None),
        };
        let year = if year_part == "????" {
            None
        } else {
            if year_part.len() != 4 || !year_part.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            let y: u16 = year_part.parse().ok()?;
            if !(MIN_YEAR..=MAX_YEAR).contains(&y) {
                return None;
            }
            Some(y)
        };
        Some(TitleKey {
            title: title.to_string(),
            year,
            numeral,
        })
    }

    /// The quoted-title convention marks episodic (TV series) titles.
    pub fn is_quoted(&self) -> bool {
        self.title.len() >= 2 && self.title.starts_with('"') && self.title.ends_with('"')
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TitleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (", self.title)?;
        match self.year {
            Some(y) => write!(f, "{y:04}")?,
            None => write!(f, "????")?,
        }
        if let Some(n) = &self.numeral {
            write!(f, "/{n}")?;
        }
        write!(f, ")")
    }
}

// Keys sort by their rendered text, so every map and report that is keyed by
// title lists entries in plain lexicographic order.
impl Ord for TitleKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.render().cmp(&other.render())
    }
}

impl PartialOrd for TitleKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
