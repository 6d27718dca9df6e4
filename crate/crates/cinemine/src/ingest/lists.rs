//! Line and block parsers for the plain-text list files.
//!
//! All parsers share the same tolerance policy: malformed lines are skipped
//! and counted rather than aborting the run, but a file where more than half
//! of the candidate lines fail to parse is rejected outright since that
//! almost always means the wrong file was supplied. Lines starting with `#`
//! and blank lines are ignored entirely and never counted.

use serde::{Deserialize, Serialize};

use super::title::TitleKey;
use super::IngestError;

/// What kind of production a title line describes, derived purely from
/// surface markers on the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TitleKind {
    Movie,
    TvSeries,
    TvMovie,
    Video,
    VideoGame,
    MiniSeries,
}

impl TitleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TitleKind::Movie => "movie",
            TitleKind::TvSeries => "tv-series",
            TitleKind::TvMovie => "tv-movie",
            TitleKind::Video => "video",
            TitleKind::VideoGame => "video-game",
            TitleKind::MiniSeries => "mini-series",
        }
    }

    pub fn from_str_token(token: &str) -> Option<TitleKind> {
        Some(match token {
            "movie" => TitleKind::Movie,
            "tv-series" => TitleKind::TvSeries,
            "tv-movie" => TitleKind::TvMovie,
            "video" => TitleKind::Video,
            "video-game" => TitleKind::VideoGame,
            "mini-series" => TitleKind::MiniSeries,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CreditRole {
    Director,
    Actor,
    Actress,
}

impl CreditRole {
    pub fn as_str(self) -> &'static str {
        match self {
            CreditRole::Director => "director",
            CreditRole::Actor => "actor",
            CreditRole::Actress => "actress",
        }
    }

    pub fn from_str_token(token: &str) -> Option<CreditRole> {
        Some(match token {
            "director" => CreditRole::Director,
            "actor" => CreditRole::Actor,
            "actress" => CreditRole::Actress,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AttributeKind {
    Country,
    Language,
    BudgetLine,
}

impl AttributeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttributeKind::Country => "country",
            AttributeKind::Language => "language",
            AttributeKind::BudgetLine => "budget-line",
        }
    }

    pub fn from_str_token(token: &str) -> Option<AttributeKind> {
        Some(match token {
            "country" => AttributeKind::Country,
            "language" => AttributeKind::Language,
            "budget-line" => AttributeKind::BudgetLine,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovieRecord {
    pub key: TitleKey,
    pub kind: TitleKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub key: TitleKey,
    pub votes: u64,
    pub rating: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CreditRecord {
    pub person: String,
    pub role: CreditRole,
    pub key: TitleKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeRecord {
    pub key: TitleKey,
    pub kind: AttributeKind,
    pub value: String,
}

/// Per-file bookkeeping: `parsed + skipped` equals the number of candidate
/// lines (non-blank, non-comment, non-structural).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineStats {
    pub parsed: usize,
    pub skipped: usize,
}

impl LineStats {
    pub fn candidates(&self) -> usize {
        self.parsed + self.skipped
    }
}

/// A parsed file: the records plus the skip counts for the run summary.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub stats: LineStats,
}

fn is_ignored(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

fn check_malformed_ratio(file: &str, stats: LineStats) -> Result<(), IngestError> {
    if stats.skipped * 2 > stats.candidates() {
        return Err(IngestError::TooManyMalformed {
            file: file.to_string(),
            skipped: stats.skipped,
            candidates: stats.candidates(),
        });
    }
    Ok(())
}

const KIND_SUFFIXES: [(&str, TitleKind); 4] = [
    ("(TV)", TitleKind::TvMovie),
    ("(V)", TitleKind::Video),
    ("(VG)", TitleKind::VideoGame),
    ("(mini)", TitleKind::MiniSeries),
];

/// Parse one movies-list line into a key and kind.
fn parse_movie_line(line: &str) -> Option<MovieRecord> {
    let line = line.trim();
    if let Some(key) = TitleKey::parse(line) {
        let kind = if key.is_quoted() {
            TitleKind::TvSeries
        } else {
            TitleKind::Movie
        };
        return Some(MovieRecord { key, kind });
    }
    for (suffix, kind) in KIND_SUFFIXES {
        if let Some(rest) = line.strip_suffix(suffix) {
            let key = TitleKey::parse(rest.trim_end())?;
            return Some(MovieRecord { key, kind });
        }
    }
    None
}

/// One record per well-formed title line; malformed lines are skipped and
/// counted.
pub fn parse_movies(text: &str) -> Result<Parsed<MovieRecord>, IngestError> {
    let mut records = Vec::new();
    let mut stats = LineStats::default();
    for line in text.lines() {
        if is_ignored(line) {
            continue;
        }
        match parse_movie_line(line) {
            Some(rec) => {
                records.push(rec);
                stats.parsed += 1;
            }
            None => stats.skipped += 1,
        }
    }
    check_malformed_ratio("movies", stats)?;
    Ok(Parsed { records, stats })
}

/// `<votes> <rating> <title-key>`, whitespace-separated. Ratings outside
/// [1.0, 10.0] are rejected; surviving values are rounded to one decimal.
pub fn parse_ratings(text: &str) -> Result<Parsed<RatingRecord>, IngestError> {
    let mut records = Vec::new();
    let mut stats = LineStats::default();
    for line in text.lines() {
        if is_ignored(line) {
            continue;
        }
        match parse_rating_line(line.trim()) {
            Some(rec) => {
                records.push(rec);
                stats.parsed += 1;
            }
            None => stats.skipped += 1,
        }
    }
    check_malformed_ratio("ratings", stats)?;
    Ok(Parsed { records, stats })
}

fn parse_rating_line(line: &str) -> Option<RatingRecord> {
    let (votes_tok, rest) = split_first_token(line)?;
    let (rating_tok, key_text) = split_first_token(rest)?;
    let votes: u64 = votes_tok.parse().ok()?;
    let rating: f64 = rating_tok.parse().ok()?;
    if !rating.is_finite() || !(1.0..=10.0).contains(&rating) {
        return None;
    }
    let rating = (rating * 10.0).round() / 10.0;
    let key = TitleKey::parse(key_text)?;
    Some(RatingRecord { key, votes, rating })
}

fn split_first_token(s: &str) -> Option<(&str, &str)> {
    let s = s.trim_start();
    let end = s.find(char::is_whitespace)?;
    let (tok, rest) = s.split_at(end);
    Some((tok, rest.trim_start()))
}

/// Person blocks: `person<TAB>title` opens a block, lines starting with TAB
/// add further titles for the same person, a blank line closes the block.
pub fn parse_credits(text: &str, role: CreditRole) -> Result<Parsed<CreditRecord>, IngestError> {
    let mut records = Vec::new();
    let mut stats = LineStats::default();
    let mut current: Option<String> = None;
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            current = None;
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        if line.starts_with('\t') {
            let person = match &current {
                Some(p) => p.clone(),
                None => {
                    return Err(IngestError::OrphanContinuation { line: lineno + 1 });
                }
            };
            match TitleKey::parse(trimmed) {
                Some(key) => {
                    records.push(CreditRecord { person, role, key });
                    stats.parsed += 1;
                }
                None => stats.skipped += 1,
            }
        } else {
            match line.split_once('\t') {
                Some((person, rest)) if !person.trim().is_empty() => {
                    let person = person.trim().to_string();
                    current = Some(person.clone());
                    match TitleKey::parse(rest.trim()) {
                        Some(key) => {
                            records.push(CreditRecord { person, role, key });
                            stats.parsed += 1;
                        }
                        None => stats.skipped += 1,
                    }
                }
                _ => stats.skipped += 1,
            }
        }
    }
    check_malformed_ratio("credits", stats)?;
    Ok(Parsed { records, stats })
}

/// Country and language lists are `title-key<TAB>value` lines; budget lines
/// come grouped under `MV:` headers with one `BT:` line per amount.
pub fn parse_attributes(
    text: &str,
    kind: AttributeKind,
) -> Result<Parsed<AttributeRecord>, IngestError> {
    match kind {
        AttributeKind::BudgetLine => parse_business(text),
        _ => parse_tabbed_attributes(text, kind),
    }
}

fn parse_tabbed_attributes(
    text: &str,
    kind: AttributeKind,
) -> Result<Parsed<AttributeRecord>, IngestError> {
    let mut records = Vec::new();
    let mut stats = LineStats::default();
    for line in text.lines() {
        if is_ignored(line) {
            continue;
        }
        let parsed = line.split_once('\t').and_then(|(key_text, value)| {
            let key = TitleKey::parse(key_text.trim())?;
            let value = value.trim();
            if value.is_empty() || value.contains('\t') {
                return None;
            }
            Some(AttributeRecord {
                key,
                kind,
                value: value.to_string(),
            })
        });
        match parsed {
            Some(rec) => {
                records.push(rec);
                stats.parsed += 1;
            }
            None => stats.skipped += 1,
        }
    }
    check_malformed_ratio(kind.as_str(), stats)?;
    Ok(Parsed { records, stats })
}

fn parse_business(text: &str) -> Result<Parsed<AttributeRecord>, IngestError> {
    let mut records = Vec::new();
    let mut stats = LineStats::default();
    let mut current: Option<TitleKey> = None;
    for line in text.lines() {
        if is_ignored(line) {
            continue;
        }
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("MV:") {
            // Header lines are structural: they carry no record of their own.
            match TitleKey::parse(rest.trim()) {
                Some(key) => current = Some(key),
                None => {
                    current = None;
                    stats.skipped += 1;
                }
            }
        } else if let Some(rest) = line.strip_prefix("BT:") {
            let value = rest.trim();
            match (&current, value.is_empty() || value.contains('\t')) {
                (Some(key), false) => {
                    records.push(AttributeRecord {
                        key: key.clone(),
                        kind: AttributeKind::BudgetLine,
                        value: value.to_string(),
                    });
                    stats.parsed += 1;
                }
                _ => stats.skipped += 1,
            }
        } else {
            stats.skipped += 1;
        }
    }
    check_malformed_ratio("business", stats)?;
    Ok(Parsed { records, stats })
}
