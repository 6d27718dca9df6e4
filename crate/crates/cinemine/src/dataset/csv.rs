//! Dataset CSV form.
//!
//! Line 1 is a `#role:` sidecar naming each column's role (the class column
//! is tagged `class`), line 2 the header, then one row per instance. `?` is
//! the missing-value token. Numbers print in shortest round-trip form, so
//! load(export(d)) reproduces d exactly.

use std::fs;
use std::path::Path;

use crate::ingest::TitleKey;

use super::{Column, Dataset, DatasetError, Instance, PopularityClass, Role, Value};

pub fn export_dataset(dataset: &Dataset) -> String {
    let mut out = String::new();

    out.push_str("#role: ");
    for col in &dataset.columns {
        out.push_str(col.role.as_str());
        out.push(',');
    }
    out.push_str("class\n");

    for col in &dataset.columns {
        push_field(&mut out, &col.name);
        out.push(',');
    }
    out.push_str("class\n");

    for inst in &dataset.instances {
        debug_assert_eq!(inst.values.len(), dataset.columns.len());
        for value in &inst.values {
            match value {
                Value::Num(n) => push_field(&mut out, &n.to_string()),
                Value::Text(t) => push_field(&mut out, t),
                Value::Missing => out.push('?'),
            }
            out.push(',');
        }
        out.push_str(inst.class.label());
        out.push('\n');
    }
    out
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<(), DatasetError> {
    fs::write(path, export_dataset(dataset)).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn push_field(out: &mut String, field: &str) {
    if field.contains(['"', ',', '\n', '\r']) {
        out.push('"');
        for ch in field.chars() {
            if ch == '"' {
                out.push('"');
            }
            out.push(ch);
        }
        out.push('"');
    } else {
        out.push_str(field);
    }
}

pub fn load_dataset(path: &Path) -> Result<Dataset, DatasetError> {
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(&text)
}

pub fn parse_dataset(text: &str) -> Result<Dataset, DatasetError> {
    let err = |line: usize, reason: &str| DatasetError::Format {
        line,
        reason: reason.to_string(),
    };

    let mut lines = text.lines().enumerate();
    let (_, role_line) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let roles_text = role_line
        .strip_prefix("#role:")
        .ok_or_else(|| err(1, "missing #role: sidecar line"))?;
    let role_tokens: Vec<&str> = roles_text.split(',').map(str::trim).collect();
    if role_tokens.last() != Some(&"class") {
        return Err(err(1, "last role must be class"));
    }
    let roles: Vec<Role> = role_tokens[..role_tokens.len() - 1]
        .iter()
        .map(|t| Role::from_str_token(t).ok_or_else(|| err(1, &format!("unknown role {t:?}"))))
        .collect::<Result<_, _>>()?;

    let (_, header_line) = lines.next().ok_or_else(|| err(2, "missing header"))?;
    let names = split_fields(header_line, 2)?;
    if names.len() != roles.len() + 1 {
        return Err(err(2, "header and role line disagree on column count"));
    }
    if names.last().map(String::as_str) != Some("class") {
        return Err(err(2, "last column must be class"));
    }
    let columns: Vec<Column> = names[..names.len() - 1]
        .iter()
        .zip(&roles)
        .map(|(name, &role)| Column {
            name: name.clone(),
            role,
        })
        .collect();

    let title_col = columns.iter().position(|c| c.name == "title");

    let mut instances = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        let fields = split_fields(line, lineno)?;
        if fields.len() != columns.len() + 1 {
            return Err(err(
                lineno,
                &format!("expected {} fields, found {}", columns.len() + 1, fields.len()),
            ));
        }
        let class = PopularityClass::from_label(fields.last().unwrap())
            .ok_or_else(|| err(lineno, &format!("unknown class {:?}", fields.last().unwrap())))?;
        let provenance = match title_col {
            Some(t) => TitleKey::parse(&fields[t])
                .ok_or_else(|| err(lineno, &format!("bad title key {:?}", fields[t])))?,
            None => return Err(err(lineno, "dataset has no title column")),
        };
        let values: Vec<Value> = fields[..fields.len() - 1]
            .iter()
            .map(|f| {
                if f == "?" {
                    Value::Missing
                } else if let Ok(n) = f.parse::<f64>() {
                    Value::Num(n)
                } else {
                    Value::Text(f.clone())
                }
            })
            .collect();
        instances.push(Instance {
            values,
            class,
            provenance,
        });
    }

    Ok(Dataset { columns, instances })
}

/// Minimal RFC 4180 field splitting: quotes guard commas, `""` is a literal
/// quote.
fn split_fields(line: &str, lineno: usize) -> Result<Vec<String>, DatasetError> {
    let err = |reason: &str| DatasetError::Format {
        line: lineno,
        reason: reason.to_string(),
    };
    let mut fields = Vec::new();
    let mut field = String::new();
    let mut chars = line.chars().peekable();
    loop {
        match chars.next() {
            None => {
                fields.push(field);
                return Ok(fields);
            }
            Some(',') => fields.push(std::mem::take(&mut field)),
            Some('"') if field.is_empty() => loop {
                match chars.next() {
                    None => return Err(err("unterminated quoted field")),
                    Some('"') => match chars.peek() {
                        Some('"') => {
                            chars.next();
                            field.push('"');
                        }
                        Some(',') | None => break,
                        Some(_) => return Err(err("text after closing quote")),
                    },
                    Some(ch) => field.push(ch),
                }
            },
            Some(ch) => field.push(ch),
        }
    }
}
