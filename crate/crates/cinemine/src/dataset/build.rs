//! From a linked store to the two analysis datasets.
//!
//! Dataset 1 is the pre-release table: career ranks and budget, balanced in
//! the Average class. Dataset 2 joins the same candidate movies to complete
//! box-office records. Both are sorted by title key, so identical stores
//! yield identical datasets.

use std::collections::{BTreeMap, BTreeSet};

use crate::ingest::{extract_amount, AttributeKind, CreditRole, MovieStore, TitleKey, TitleKind};

use super::{
    assign_class, balance_average, Column, Dataset, DatasetError, Instance, Role, Value,
};

/// Which movies a person's mean rating is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankScope {
    /// Every rated movie credited to the person, career-wide.
    All,
    /// Only movies that pass the candidate filter.
    Candidates,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildSettings {
    /// Exclusive lower bound on release year.
    pub year_min: u16,
    /// Exclusive upper bound on release year.
    pub year_max: u16,
    pub country: String,
    pub language: String,
    pub min_votes: u64,
    pub rank_scope: RankScope,
}

impl Default for BuildSettings {
    fn default() -> BuildSettings {
        BuildSettings {
            year_min: 2000,
            year_max: 2011,
            country: "USA".to_string(),
            language: "English".to_string(),
            min_votes: 1000,
            rank_scope: RankScope::All,
        }
    }
}

/// A person's standing: the mean rating of their rated movies.
#[derive(Debug, Clone, PartialEq)]
pub struct PersonRank {
    pub person: String,
    pub role: CreditRole,
    pub rank: f64,
    pub support: usize,
}

/// Keys of movies that satisfy every filter predicate, in sorted order.
pub fn filter_candidates(store: &MovieStore, settings: &BuildSettings) -> Vec<TitleKey> {
    store
        .movies
        .iter()
        .filter(|(key, kind)| {
            **kind == TitleKind::Movie
                && key
                    .year
                    .is_some_and(|y| y > settings.year_min && y < settings.year_max)
                && store
                    .attribute_values(key, AttributeKind::Language)
                    .any(|v| v == settings.language)
                && store
                    .attribute_values(key, AttributeKind::Country)
                    .any(|v| v == settings.country)
                && store
                    .ratings
                    .get(key)
                    .is_some_and(|r| r.votes >= settings.min_votes)
        })
        .map(|(key, _)| key.clone())
        .collect()
}

/// Mean rating per person for one role. `scope` restricts which credited
/// movies count; persons with no rated movie in scope are absent.
pub fn person_ranks(
    store: &MovieStore,
    role: CreditRole,
    scope: RankScope,
    candidates: &BTreeSet<TitleKey>,
) -> BTreeMap<String, PersonRank> {
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for credit in store.credits.iter().filter(|c| c.role == role) {
        if scope == RankScope::Candidates && !candidates.contains(&credit.key) {
            continue;
        }
        if let Some(r) = store.ratings.get(&credit.key) {
            let entry = sums.entry(credit.person.clone()).or_insert((0.0, 0));
            entry.0 += r.rating;
            entry.1 += 1;
        }
    }
    sums.into_iter()
        .map(|(person, (sum, count))| {
            let rank = PersonRank {
                person: person.clone(),
                role,
                rank: sum / count as f64,
                support: count,
            };
            (person, rank)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    /// Mean of the ranked directors; missing when none is ranked.
    pub director_rank: Option<f64>,
    /// Sum of the ranked actors' ranks; an empty sum is 0.
    pub male_cast_rank: f64,
    pub female_cast_rank: f64,
    /// First USD budget line, in whole dollars.
    pub budget: Option<f64>,
}

pub struct RoleRanks {
    pub directors: BTreeMap<String, PersonRank>,
    pub actors: BTreeMap<String, PersonRank>,
    pub actresses: BTreeMap<String, PersonRank>,
}

impl RoleRanks {
    pub fn compute(store: &MovieStore, scope: RankScope, candidates: &BTreeSet<TitleKey>) -> RoleRanks {
        RoleRanks {
            directors: person_ranks(store, CreditRole::Director, scope, candidates),
            actors: person_ranks(store, CreditRole::Actor, scope, candidates),
            actresses: person_ranks(store, CreditRole::Actress, scope, candidates),
        }
    }
}

pub fn derive_features(key: &TitleKey, store: &MovieStore, ranks: &RoleRanks) -> Features {
    let people = |role: CreditRole| {
        store
            .credits
            .iter()
            .filter(move |c| c.role == role && c.key == *key)
            .map(|c| c.person.as_str())
    };

    let director_ranks: Vec<f64> = people(CreditRole::Director)
        .filter_map(|p| ranks.directors.get(p))
        .map(|r| r.rank)
        .collect();
    let director_rank = if director_ranks.is_empty() {
        None
    } else {
        Some(director_ranks.iter().sum::<f64>() / director_ranks.len() as f64)
    };

    let sum_ranks = |role: CreditRole, table: &BTreeMap<String, PersonRank>| {
        people(role)
            .filter_map(|p| table.get(p))
            .map(|r| r.rank)
            .sum::<f64>()
    };
    let male_cast_rank = sum_ranks(CreditRole::Actor, &ranks.actors);
    let female_cast_rank = sum_ranks(CreditRole::Actress, &ranks.actresses);

    let budget = store
        .attribute_values(key, AttributeKind::BudgetLine)
        .filter_map(|raw| extract_amount(raw).ok())
        .find(|m| m.is_usd())
        .map(|m| m.amount as f64);

    Features {
        director_rank,
        male_cast_rank,
        female_cast_rank,
        budget,
    }
}

/// The pre-release dataset: filter, derive ranks and budget, bin the class,
/// drop instances lacking director rank or budget, then thin the Average
/// class. Ids are assigned before thinning, so the kept rows keep theirs.
pub fn build_dataset1(
    store: &MovieStore,
    settings: &BuildSettings,
) -> Result<Dataset, DatasetError> {
    let columns = vec![
        Column::new("id", Role::Identifier),
        Column::new("title", Role::Identifier),
        Column::new("year", Role::Feature),
        Column::new("language", Role::Excluded),
        Column::new("country", Role::Excluded),
        Column::new("budget", Role::Feature),
        Column::new("director_rank", Role::Feature),
        Column::new("male_cast_rank", Role::Feature),
        Column::new("female_cast_rank", Role::Feature),
        Column::new("votes", Role::Excluded),
        Column::new("rating", Role::Excluded),
    ];

    let candidates = filter_candidates(store, settings);
    let candidate_set: BTreeSet<TitleKey> = candidates.iter().cloned().collect();
    let ranks = RoleRanks::compute(store, settings.rank_scope, &candidate_set);

    let mut instances = Vec::new();
    let mut id = 0u64;
    for key in &candidates {
        id += 1;
        let features = derive_features(key, store, &ranks);
        let (director_rank, budget) = match (features.director_rank, features.budget) {
            (Some(d), Some(b)) => (d, b),
            _ => continue,
        };
        let rating = store.ratings[key].rating;
        let votes = store.ratings[key].votes;
        instances.push(Instance {
            values: vec![
                Value::Num(id as f64),
                Value::Text(key.to_string()),
                Value::Num(key.year.expect("filtered on year") as f64),
                Value::Text(settings.language.clone()),
                Value::Text(settings.country.clone()),
                Value::Num(budget),
                Value::Num(director_rank),
                Value::Num(features.male_cast_rank),
                Value::Num(features.female_cast_rank),
                Value::Num(votes as f64),
                Value::Num(rating),
            ],
            class: assign_class(rating)?,
            provenance: key.clone(),
        });
    }

    Ok(balance_average(&Dataset { columns, instances }))
}

/// The post-release dataset: candidates joined to complete USD box-office
/// records. No balancing.
pub fn build_dataset2(
    store: &MovieStore,
    settings: &BuildSettings,
) -> Result<Dataset, DatasetError> {
    let columns = vec![
        Column::new("id", Role::Identifier),
        Column::new("title", Role::Identifier),
        Column::new("budget", Role::Feature),
        Column::new("domestic", Role::Feature),
        Column::new("foreign", Role::Feature),
        Column::new("worldwide", Role::Feature),
        Column::new("votes", Role::Excluded),
        Column::new("rating", Role::Excluded),
    ];

    let mut instances = Vec::new();
    let mut id = 0u64;
    for key in filter_candidates(store, settings) {
        let Some(fin) = store.finances.get(&key) else {
            continue;
        };
        let all_usd = [&fin.budget, &fin.domestic, &fin.foreign, &fin.worldwide];
        if !all_usd.iter().all(|m| m.as_ref().is_some_and(|m| m.is_usd())) {
            continue;
        }
        id += 1;
        let amount = |m: &Option<crate::ingest::Money>| m.as_ref().unwrap().amount as f64;
        let rating = store.ratings[&key].rating;
        let votes = store.ratings[&key].votes;
        instances.push(Instance {
            values: vec![
                Value::Num(id as f64),
                Value::Text(key.to_string()),
                Value::Num(amount(&fin.budget)),
                Value::Num(amount(&fin.domestic)),
                Value::Num(amount(&fin.foreign)),
                Value::Num(amount(&fin.worldwide)),
                Value::Num(votes as f64),
                Value::Num(rating),
            ],
            class: assign_class(rating)?,
            provenance: key,
        });
    }

    Ok(Dataset { columns, instances })
}
