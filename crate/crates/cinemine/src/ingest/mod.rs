//! Ingestion: list-file parsing and the movie store.
//!
//! The raw inputs are IMDB-style plain-text lists (movies, ratings, credits,
//! countries, languages, business) plus a box-office CSV. Parsing turns them
//! into typed records; [`build_store`] links the records by title key and
//! drops anything that refers to an unknown movie. The finished
//! [`MovieStore`] is immutable and can be saved to and reloaded from a
//! directory of TSV files without loss.

pub mod boxoffice;
pub mod lists;
pub mod money;
pub mod title;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

pub use boxoffice::{parse_boxoffice_csv, FinanceRecord};
pub use lists::{
    parse_attributes, parse_credits, parse_movies, parse_ratings, AttributeKind, AttributeRecord,
    CreditRecord, CreditRole, LineStats, MovieRecord, Parsed, RatingRecord, TitleKind,
};
pub use money::{extract_amount, Money};
pub use title::TitleKey;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{file} list: {skipped} of {candidates} candidate lines malformed; wrong file?")]
    TooManyMalformed {
        file: String,
        skipped: usize,
        candidates: usize,
    },
    #[error("line {line}: continuation line before any person line")]
    OrphanContinuation { line: usize },
    #[error("bad currency code {0:?}: expected three uppercase letters")]
    BadCurrency(String),
    #[error("no currency amount found in {0:?}")]
    NoAmount(String),
    #[error("box-office csv: expected header title,year,budget,domestic,foreign,worldwide, found {found:?}")]
    CsvHeader { found: String },
    #[error("box-office csv line {line}: {reason}")]
    CsvRow { line: usize, reason: String },
    #[error("{key}: worldwide earnings below a component figure")]
    InconsistentFinance { key: String },
    #[error("{file} line {line}: {reason}")]
    StoreFormat {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("store is inconsistent: {0}")]
    Dangling(String),
}

pub fn read_text(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), IngestError> {
    fs::write(path, text).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Everything known about the corpus, linked by exact title key.
///
/// Attribute records keep their source-file order per key; the budget
/// extraction rule ("first USD line wins") depends on it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MovieStore {
    pub movies: BTreeMap<TitleKey, TitleKind>,
    pub ratings: BTreeMap<TitleKey, RatingRecord>,
    pub credits: BTreeSet<CreditRecord>,
    pub attributes: BTreeMap<TitleKey, Vec<AttributeRecord>>,
    pub finances: BTreeMap<TitleKey, FinanceRecord>,
}

impl MovieStore {
    pub fn attribute_values<'a>(
        &'a self,
        key: &TitleKey,
        kind: AttributeKind,
    ) -> impl Iterator<Item = &'a str> {
        self.attributes
            .get(key)
            .into_iter()
            .flatten()
            .filter(move |a| a.kind == kind)
            .map(|a| a.value.as_str())
    }
}

/// Referential drops per input table (dedup of credits is not a drop).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DropCounts {
    pub ratings: usize,
    pub credits: usize,
    pub attributes: usize,
    pub finances: usize,
}

impl DropCounts {
    pub fn total(&self) -> usize {
        self.ratings + self.credits + self.attributes + self.finances
    }
}

#[derive(Debug, Clone, Default)]
pub struct StoreInputs {
    pub movies: Vec<MovieRecord>,
    pub ratings: Vec<RatingRecord>,
    pub credits: Vec<CreditRecord>,
    pub attributes: Vec<AttributeRecord>,
    pub finances: Vec<FinanceRecord>,
}

/// Link parsed tables into a store, dropping records whose key has no movie.
pub fn build_store(inputs: StoreInputs) -> (MovieStore, DropCounts) {
    let mut store = MovieStore::default();
    let mut drops = DropCounts::default();
    for m in inputs.movies {
        store.movies.insert(m.key, m.kind);
    }
    for r in inputs.ratings {
        if store.movies.contains_key(&r.key) {
            store.ratings.insert(r.key.clone(), r);
        } else {
            drops.ratings += 1;
        }
    }
    for c in inputs.credits {
        if store.movies.contains_key(&c.key) {
            store.credits.insert(c);
        } else {
            drops.credits += 1;
        }
    }
    for a in inputs.attributes {
        if store.movies.contains_key(&a.key) {
            store.attributes.entry(a.key.clone()).or_default().push(a);
        } else {
            drops.attributes += 1;
        }
    }
    for f in inputs.finances {
        if store.movies.contains_key(&f.key) {
            store.finances.insert(f.key.clone(), f);
        } else {
            drops.finances += 1;
        }
    }
    (store, drops)
}

const MOVIES_TSV: &str = "movies.tsv";
const RATINGS_TSV: &str = "ratings.tsv";
const CREDITS_TSV: &str = "credits.tsv";
const ATTRIBUTES_TSV: &str = "attributes.tsv";
const FINANCES_TSV: &str = "finances.tsv";

/// Write the store as five sorted TSV files under `dir`.
pub fn save_store(store: &MovieStore, dir: &Path) -> Result<(), IngestError> {
    fs::create_dir_all(dir).map_err(|source| IngestError::Io {
        path: dir.display().to_string(),
        source,
    })?;

    let mut out = String::new();
    for (key, kind) in &store.movies {
        writeln!(out, "{key}\t{}", kind.as_str()).unwrap();
    }
    write_text(&dir.join(MOVIES_TSV), &out)?;

    out.clear();
    for (key, r) in &store.ratings {
        writeln!(out, "{key}\t{}\t{:.1}", r.votes, r.rating).unwrap();
    }
    write_text(&dir.join(RATINGS_TSV), &out)?;

    out.clear();
    for c in &store.credits {
        writeln!(out, "{}\t{}\t{}", c.person, c.role.as_str(), c.key).unwrap();
    }
    write_text(&dir.join(CREDITS_TSV), &out)?;

    out.clear();
    for records in store.attributes.values() {
        for a in records {
            writeln!(out, "{}\t{}\t{}", a.key, a.kind.as_str(), a.value).unwrap();
        }
    }
    write_text(&dir.join(ATTRIBUTES_TSV), &out)?;

    out.clear();
    for (key, f) in &store.finances {
        let cell = |m: &Option<Money>| m.as_ref().map_or("?".to_string(), Money::render);
        writeln!(
            out,
            "{key}\t{}\t{}\t{}\t{}",
            cell(&f.budget),
            cell(&f.domestic),
            cell(&f.foreign),
            cell(&f.worldwide)
        )
        .unwrap();
    }
    write_text(&dir.join(FINANCES_TSV), &out)
}

fn store_err(file: &str, line: usize, reason: impl Into<String>) -> IngestError {
    IngestError::StoreFormat {
        file: file.to_string(),
        line,
        reason: reason.into(),
    }
}

fn tsv_fields<'a>(
    file: &str,
    lineno: usize,
    line: &'a str,
    want: usize,
) -> Result<Vec<&'a str>, IngestError> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != want {
        return Err(store_err(
            file,
            lineno,
            format!("expected {want} fields, found {}", fields.len()),
        ));
    }
    Ok(fields)
}

fn parse_key(file: &str, lineno: usize, text: &str) -> Result<TitleKey, IngestError> {
    TitleKey::parse(text).ok_or_else(|| store_err(file, lineno, format!("bad title key {text:?}")))
}

fn parse_money_cell(file: &str, lineno: usize, cell: &str) -> Result<Option<Money>, IngestError> {
    if cell == "?" {
        return Ok(None);
    }
    extract_amount(cell)
        .map(Some)
        .map_err(|_| store_err(file, lineno, format!("bad money cell {cell:?}")))
}

/// Reload a store saved by [`save_store`]; strict, and re-checks that every
/// record still resolves to a movie.
pub fn load_store(dir: &Path) -> Result<MovieStore, IngestError> {
    let mut store = MovieStore::default();

    let text = read_text(&dir.join(MOVIES_TSV))?;
    for (i, line) in text.lines().enumerate() {
        let f = tsv_fields(MOVIES_TSV, i + 1, line, 2)?;
        let key = parse_key(MOVIES_TSV, i + 1, f[0])?;
        let kind = TitleKind::from_str_token(f[1])
            .ok_or_else(|| store_err(MOVIES_TSV, i + 1, format!("unknown kind {:?}", f[1])))?;
        store.movies.insert(key, kind);
    }

    let text = read_text(&dir.join(RATINGS_TSV))?;
    for (i, line) in text.lines().enumerate() {
        let f = tsv_fields(RATINGS_TSV, i + 1, line, 3)?;
        let key = parse_key(RATINGS_TSV, i + 1, f[0])?;
        let votes: u64 = f[1]
            .parse()
            .map_err(|_| store_err(RATINGS_TSV, i + 1, format!("bad votes {:?}", f[1])))?;
        let rating: f64 = f[2]
            .parse()
            .map_err(|_| store_err(RATINGS_TSV, i + 1, format!("bad rating {:?}", f[2])))?;
        if !(1.0..=10.0).contains(&rating) {
            return Err(store_err(RATINGS_TSV, i + 1, format!("rating {rating} out of range")));
        }
        store.ratings.insert(key.clone(), RatingRecord { key, votes, rating });
    }

    let text = read_text(&dir.join(CREDITS_TSV))?;
    for (i, line) in text.lines().enumerate() {
        let f = tsv_fields(CREDITS_TSV, i + 1, line, 3)?;
        let role = CreditRole::from_str_token(f[1])
            .ok_or_else(|| store_err(CREDITS_TSV, i + 1, format!("unknown role {:?}", f[1])))?;
        if f[0].is_empty() {
            return Err(store_err(CREDITS_TSV, i + 1, "empty person name"));
        }
        let key = parse_key(CREDITS_TSV, i + 1, f[2])?;
        store.credits.insert(CreditRecord {
            person: f[0].to_string(),
            role,
            key,
        });
    }

    let text = read_text(&dir.join(ATTRIBUTES_TSV))?;
    for (i, line) in text.lines().enumerate() {
        let f = tsv_fields(ATTRIBUTES_TSV, i + 1, line, 3)?;
        let key = parse_key(ATTRIBUTES_TSV, i + 1, f[0])?;
        let kind = AttributeKind::from_str_token(f[1])
            .ok_or_else(|| store_err(ATTRIBUTES_TSV, i + 1, format!("unknown kind {:?}", f[1])))?;
        if f[2].is_empty() {
            return Err(store_err(ATTRIBUTES_TSV, i + 1, "empty value"));
        }
        store.attributes.entry(key.clone()).or_default().push(AttributeRecord {
            key,
            kind,
            value: f[2].to_string(),
        });
    }

    let text = read_text(&dir.join(FINANCES_TSV))?;
    for (i, line) in text.lines().enumerate() {
        let f = tsv_fields(FINANCES_TSV, i + 1, line, 5)?;
        let key = parse_key(FINANCES_TSV, i + 1, f[0])?;
        let budget = parse_money_cell(FINANCES_TSV, i + 1, f[1])?;
        let domestic = parse_money_cell(FINANCES_TSV, i + 1, f[2])?;
        let foreign = parse_money_cell(FINANCES_TSV, i + 1, f[3])?;
        let worldwide = parse_money_cell(FINANCES_TSV, i + 1, f[4])?;
        let record = FinanceRecord::new(key.clone(), budget, domestic, foreign, worldwide)?;
        store.finances.insert(key, record);
    }

    check_links(&store)?;
    Ok(store)
}

fn check_links(store: &MovieStore) -> Result<(), IngestError> {
    let dangling = |key: &TitleKey| !store.movies.contains_key(key);
    if let Some(key) = store.ratings.keys().find(|k| dangling(k)) {
        return Err(IngestError::Dangling(format!("rating for unknown {key}")));
    }
    if let Some(c) = store.credits.iter().find(|c| dangling(&c.key)) {
        return Err(IngestError::Dangling(format!("credit for unknown {}", c.key)));
    }
    if let Some(key) = store.attributes.keys().find(|k| dangling(k)) {
        return Err(IngestError::Dangling(format!("attribute for unknown {key}")));
    }
    if let Some(key) = store.finances.keys().find(|k| dangling(k)) {
        return Err(IngestError::Dangling(format!("finances for unknown {key}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(text: &str) -> TitleKey {
        TitleKey::parse(text).unwrap()
    }

    fn sample_inputs() -> StoreInputs {
        StoreInputs {
            movies: parse_movies(
                "Alpha (2003)\nBeta (2004)\n\"Serial\" (2004)\nMirror Lake (2004/I)\n",
            )
            .unwrap()
            .records,
            ratings: parse_ratings("1205 7.5 Alpha (2003)\n999 5.0 Beta (2004)\n")
                .unwrap()
                .records,
            credits: parse_credits("Doe, Jane\tAlpha (2003)\n\tBeta (2004)\n", CreditRole::Director)
                .unwrap()
                .records,
            attributes: {
                let mut v = parse_attributes("Alpha (2003)\tUSA\n", AttributeKind::Country)
                    .unwrap()
                    .records;
                v.extend(
                    parse_attributes(
                        "MV: Alpha (2003)\nBT: GBP 2,000,000\nBT: USD 3,500,000\n",
                        AttributeKind::BudgetLine,
                    )
                    .unwrap()
                    .records,
                );
                v
            },
            finances: parse_boxoffice_csv(
                "title,year,budget,domestic,foreign,worldwide\nAlpha,2003,1000,5000,3000,8000\nBeta,2004,700,,,\n",
            )
            .unwrap(),
        }
    }

    #[test]
    fn consistent_inputs_keep_all_records() {
        let inputs = sample_inputs();
        let sizes = (
            inputs.movies.len(),
            inputs.ratings.len(),
            inputs.credits.len(),
            inputs.attributes.len(),
            inputs.finances.len(),
        );
        let (store, drops) = build_store(inputs);
        assert_eq!(drops, DropCounts::default());
        assert_eq!(
            (
                store.movies.len(),
                store.ratings.len(),
                store.credits.len(),
                store.attributes.values().map(Vec::len).sum::<usize>(),
                store.finances.len(),
            ),
            sizes
        );
    }

    #[test]
    fn dangling_records_are_dropped_and_counted() {
        let mut inputs = sample_inputs();
        inputs
            .ratings
            .extend(parse_ratings("50 6.0 Ghost Entry (2003)\n").unwrap().records);
        let (store, drops) = build_store(inputs);
        assert_eq!(drops.ratings, 1);
        assert_eq!(drops.total(), 1);
        assert!(!store.ratings.contains_key(&key("Ghost Entry (2003)")));
    }

    #[test]
    fn duplicate_credits_deduplicate() {
        let mut inputs = sample_inputs();
        let dup = inputs.credits[0].clone();
        inputs.credits.push(dup);
        let (store, drops) = build_store(inputs);
        assert_eq!(store.credits.len(), 2);
        assert_eq!(drops.credits, 0);
    }

    #[test]
    fn budget_lines_keep_file_order() {
        let (store, _) = build_store(sample_inputs());
        let lines: Vec<&str> = store
            .attribute_values(&key("Alpha (2003)"), AttributeKind::BudgetLine)
            .collect();
        assert_eq!(lines, ["GBP 2,000,000", "USD 3,500,000"]);
    }

    #[test]
    fn save_load_round_trip() {
        let (store, _) = build_store(sample_inputs());
        let dir = tempfile::tempdir().unwrap();
        save_store(&store, dir.path()).unwrap();
        let loaded = load_store(dir.path()).unwrap();
        assert_eq!(store, loaded);
    }

    #[test]
    fn load_rejects_dangling_rows() {
        let (store, _) = build_store(sample_inputs());
        let dir = tempfile::tempdir().unwrap();
        save_store(&store, dir.path()).unwrap();
        let path = dir.path().join("ratings.tsv");
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str("Zeta (2005)\t10\t5.0\n");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(load_store(dir.path()), Err(IngestError::Dangling(_))));
    }

    #[test]
    fn load_rejects_garbage() {
        let (store, _) = build_store(sample_inputs());
        let dir = tempfile::tempdir().unwrap();
        save_store(&store, dir.path()).unwrap();
        std::fs::write(dir.path().join("movies.tsv"), "not a tsv line\n").unwrap();
        assert!(matches!(
            load_store(dir.path()),
            Err(IngestError::StoreFormat { .. })
        ));
    }
}
