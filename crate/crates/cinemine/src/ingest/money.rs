//! Currency amounts and the free-text budget extractor.

use serde::{Deserialize, Serialize};

use super::IngestError;

/// A whole-unit amount in a named currency (`USD 10,000,000` style lines).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Money {
    pub amount: u64,
    pub currency: String,
}

impl Money {
    pub fn new(amount: u64, currency: impl Into<String>) -> Result<Money, IngestError> {
        let currency = currency.into();
        if currency.len() != 3 || !currency.chars().all(|c| c.is_ascii_uppercase()) {
            return Err(IngestError::BadCurrency(currency));
        }
        Ok(Money { amount, currency })
    }

    pub fn is_usd(&self) -> bool {
        self.currency == "USD"
    }

    /// `USD 10,000,000`; the inverse of [`extract_amount`] on its own output.
    pub fn render(&self) -> String {
        format!("{} {}", self.currency, thousands(self.amount))
    }
}

/// Pull `<CUR> <amount>` out of a raw budget line, ignoring thousands
/// separators and any trailing annotation such as `(estimated)`.
pub fn extract_amount(raw: &str) -> Result<Money, IngestError> {
    let mut tokens = raw.split_whitespace();
    let currency = loop {
        match tokens.next() {
            Some(t) if t.len() == 3 && t.chars().all(|c| c.is_ascii_uppercase()) => break t,
            Some(_) => continue,
            None => return Err(IngestError::NoAmount(raw.to_string())),
        }
    };
    let digits = tokens.next().ok_or_else(|| IngestError::NoAmount(raw.to_string()))?;
    if !digits.chars().next().is_some_and(|c| c.is_ascii_digit())
        || !digits.chars().all(|c| c.is_ascii_digit() || c == ',')
    {
        return Err(IngestError::NoAmount(raw.to_string()));
    }
    let amount: u64 = digits
        .replace(',', "")
        .parse()
        .map_err(|_| IngestError::NoAmount(raw.to_string()))?;
    Money::new(amount, currency)
}

/// Group digits in threes: `1234567` -> `1,234,567`.
pub fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}
