//! Box-office earnings come from a local CSV feed rather than a list file.
//!
//! Unlike the list parsers this one is strict: the feed is machine-produced,
//! so a bad header or row means the wrong file, not noise worth tolerating.

use serde::{Deserialize, Serialize};

use super::money::Money;
use super::title::TitleKey;
use super::IngestError;

pub const BOXOFFICE_HEADER: &str = "title,year,budget,domestic,foreign,worldwide";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinanceRecord {
    pub key: TitleKey,
    pub budget: Option<Money>,
    pub domestic: Option<Money>,
    pub foreign: Option<Money>,
    pub worldwide: Option<Money>,
}

impl FinanceRecord {
    /// Rejects rows where a complete domestic/foreign pair in one currency
    /// shows a worldwide total below either component.
    pub fn new(
        key: TitleKey,
        budget: Option<Money>,
        domestic: Option<Money>,
        foreign: Option<Money>,
        worldwide: Option<Money>,
    ) -> Result<FinanceRecord, IngestError> {
        if let (Some(d), Some(f), Some(w)) = (&domestic, &foreign, &worldwide) {
            if d.currency == f.currency
                && f.currency == w.currency
                && w.amount < d.amount.max(f.amount)
            {
                return Err(IngestError::InconsistentFinance {
                    key: key.to_string(),
                });
            }
        }
        Ok(FinanceRecord {
            key,
            budget,
            domestic,
            foreign,
            worldwide,
        })
    }
}

/// Header `title,year,budget,domestic,foreign,worldwide`; amounts are plain
/// USD integers; an empty cell means the figure is unknown.
pub fn parse_boxoffice_csv(text: &str) -> Result<Vec<FinanceRecord>, IngestError> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) if line.trim().is_empty() => continue,
            Some((_, line)) => break line.trim_end_matches('\r').trim(),
            None => {
                return Err(IngestError::CsvHeader {
                    found: String::new(),
                })
            }
        }
    };
    if header != BOXOFFICE_HEADER {
        return Err(IngestError::CsvHeader {
            found: header.to_string(),
        });
    }

    let mut records = Vec::new();
    for (lineno, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_row(line, lineno + 1)?);
    }
    Ok(records)
}

fn parse_row(line: &str, lineno: usize) -> Result<FinanceRecord, IngestError> {
    let cells: Vec<&str> = line.split(',').collect();
    if cells.len() != 6 {
        return Err(IngestError::CsvRow {
            line: lineno,
            reason: format!("expected 6 columns, found {}", cells.len()),
        });
    }
    let title = cells[0].trim();
    if title.is_empty() {
        return Err(IngestError::CsvRow {
            line: lineno,
            reason: "empty title".to_string(),
        });
    }
    let year: u16 = cells[1].trim().parse().map_err(|_| IngestError::CsvRow {
        line: lineno,
        reason: format!("bad year {:?}", cells[1]),
    })?;
    let key = TitleKey::parse(&format!("{title} ({year})")).ok_or(IngestError::CsvRow {
        line: lineno,
        reason: format!("bad title/year pair {title:?}/{year}"),
    })?;

    let mut amounts = [None, None, None, None];
    for (slot, cell) in amounts.iter_mut().zip(&cells[2..]) {
        let cell = cell.trim();
        if cell.is_empty() {
            continue;
        }
        let amount: u64 = cell.parse().map_err(|_| IngestError::CsvRow {
            line: lineno,
            reason: format!("bad amount {cell:?}"),
        })?;
        *slot = Some(Money::new(amount, "USD").expect("USD is a valid code"));
    }
    let [budget, domestic, foreign, worldwide] = amounts;
    FinanceRecord::new(key, budget, domestic, foreign, worldwide)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_row_maps_every_field() {
        let recs = parse_boxoffice_csv(
            "title,year,budget,domestic,foreign,worldwide\nAlpha,2003,1000,5000,3000,8000\n",
        )
        .unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.key.to_string(), "Alpha (2003)");
        assert_eq!(r.budget.as_ref().unwrap().amount, 1000);
        assert_eq!(r.domestic.as_ref().unwrap().amount, 5000);
        assert_eq!(r.foreign.as_ref().unwrap().amount, 3000);
        assert_eq!(r.worldwide.as_ref().unwrap().amount, 8000);
        assert!(r.budget.as_ref().unwrap().is_usd());
    }

    #[test]
    fn empty_cells_are_missing() {
        let recs =
            parse_boxoffice_csv("title,year,budget,domestic,foreign,worldwide\nBeta,2004,1000,,,\n")
                .unwrap();
        let r = &recs[0];
        assert!(r.budget.is_some());
        assert!(r.domestic.is_none() && r.foreign.is_none() && r.worldwide.is_none());
    }

    #[test]
    fn header_only_is_empty() {
        let recs = parse_boxoffice_csv("title,year,budget,domestic,foreign,worldwide\n").unwrap();
        assert!(recs.is_empty());
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(matches!(
            parse_boxoffice_csv("name,year,budget\n"),
            Err(IngestError::CsvHeader { .. })
        ));
    }

    #[test]
    fn wrong_column_count_is_rejected() {
        let err = parse_boxoffice_csv("title,year,budget,domestic,foreign,worldwide\nAlpha,2003\n")
            .unwrap_err();
        assert!(matches!(err, IngestError::CsvRow { line: 2, .. }));
    }

    #[test]
    fn worldwide_below_domestic_is_rejected() {
        let err = parse_boxoffice_csv(
            "title,year,budget,domestic,foreign,worldwide\nAlpha,2003,1000,5000,3000,4000\n",
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::InconsistentFinance { .. }));
    }

    #[test]
    fn worldwide_can_be_missing_with_both_components() {
        let recs = parse_boxoffice_csv(
            "title,year,budget,domestic,foreign,worldwide\nAlpha,2003,1000,5000,3000,\n",
        )
        .unwrap();
        assert!(recs[0].worldwide.is_none());
    }
}
