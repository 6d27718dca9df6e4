//! Run configuration: a flat key=value file plus command-line overrides.
//!
//! Defaults select English-language USA movies released strictly between
//! 2000 and 2011 with at least 1000 votes, evaluated by seeded 10-fold
//! cross-validation. Every knob has a default, so an empty config is valid.

use std::path::PathBuf;

use thiserror::Error;

use crate::dataset::{BuildSettings, RankScope};
use crate::learn::LearnerParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: {reason}")]
    Line { line: usize, reason: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InputPaths {
    pub movies: Option<PathBuf>,
    pub ratings: Option<PathBuf>,
    pub directors: Option<PathBuf>,
    pub actors: Option<PathBuf>,
    pub actresses: Option<PathBuf>,
    pub countries: Option<PathBuf>,
    pub languages: Option<PathBuf>,
    pub business: Option<PathBuf>,
    pub boxoffice: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: InputPaths,
    pub out: PathBuf,
    pub build: BuildSettings,
    pub params: LearnerParams,
    pub folds: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            inputs: InputPaths::default(),
            out: PathBuf::from("out"),
            build: BuildSettings::default(),
            params: LearnerParams::default(),
            folds: 10,
            seed: 1,
        }
    }
}

impl RunConfig {
    /// Apply `key=value` lines on top of the current values. Blank lines
    /// and lines starting with `#` or `;` are comments.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Line {
                line: i + 1,
                reason: "expected key=value".to_string(),
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|reason| ConfigError::Line {
                    line: i + 1,
                    reason,
                })?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("bad {key} value {value:?}"))
        }
        match key {
            "movies" => self.inputs.movies = Some(value.into()),
            "ratings" => self.inputs.ratings = Some(value.into()),
            "directors" => self.inputs.directors = Some(value.into()),
            "actors" => self.inputs.actors = Some(value.into()),
            "actresses" => self.inputs.actresses = Some(value.into()),
            "countries" => self.inputs.countries = Some(value.into()),
            "languages" => self.inputs.languages = Some(value.into()),
            "business" => self.inputs.business = Some(value.into()),
            "boxoffice" => self.inputs.boxoffice = Some(value.into()),
            "out" => self.out = value.into(),
            "year_min" => self.build.year_min = num(key, value)?,
            "year_max" => self.build.year_max = num(key, value)?,
            "country" => self.build.country = value.to_string(),
            "language" => self.build.language = value.to_string(),
            "min_votes" => self.build.min_votes = num(key, value)?,
            "rank_scope" => {
                self.build.rank_scope = match value {
                    "all" => RankScope::All,
                    "candidates" => RankScope::Candidates,
                    _ => return Err(format!("bad rank_scope value {value:?}")),
                }
            }
            "folds" => self.folds = num(key, value)?,
            "seed" => {
                self.seed = num(key, value)?;
                self.params.seed = self.seed;
            }
            "min_leaf" => self.params.min_leaf = num(key, value)?,
            "prune_fraction" => {
                let f: f64 = num(key, value)?;
                if !(0.0..1.0).contains(&f) {
                    return Err(format!("prune_fraction must be in [0, 1), got {value}"));
                }
                self.params.prune_fraction = f;
            }
            "use_gain_ratio" => {
                self.params.use_gain_ratio = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(format!("bad use_gain_ratio value {value:?}")),
                }
            }
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// The semantic settings, one per line, for echoing into artifacts.
    /// Filesystem paths stay out so artifacts compare equal across
    /// checkouts.
    pub fn echo(&self) -> String {
        let scope = match self.build.rank_scope {
            RankScope::All => "all",
            RankScope::Candidates => "candidates",
        };
        format!(
            "year_min={} year_max={} country={} language={} min_votes={}\n\
             rank_scope={} folds={} seed={}\n\
             min_leaf={} prune_fraction={} use_gain_ratio={}\n",
            self.build.year_min,
            self.build.year_max,
            self.build.country,
            self.build.language,
            self.build.min_votes,
            scope,
            self.folds,
            self.seed,
            self.params.min_leaf,
            self.params.prune_fraction,
            self.params.use_gain_ratio
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_encode_the_standard_study_settings() {
        let config = RunConfig::default();
        assert_eq!(config.build.year_min, 2000);
        assert_eq!(config.build.year_max, 2011);
        assert_eq!(config.build.country, "USA");
        assert_eq!(config.build.language, "English");
        assert_eq!(config.build.min_votes, 1000);
        assert_eq!(config.folds, 10);
        assert_eq!(config.seed, 1);
        assert_eq!(config.params.min_leaf, 2);
        assert!((config.params.prune_fraction - 1.0 / 3.0).abs() < 1e-12);
        assert!(config.params.use_gain_ratio);
        assert_eq!(config.out, PathBuf::from("out"));
    }

    #[test]
    fn file_values_land_in_the_right_fields() {
        let mut config = RunConfig::default();
        config
            .apply_file(
                "# inputs\n\
                 movies = data/movies.list\n\
                 ; filters\n\
                 year_min = 1995\n\
                 country = Canada\n\
                 min_votes = 500\n\
                 \n\
                 seed = 42\n\
                 rank_scope = candidates\n\
                 use_gain_ratio = false\n",
            )
            .unwrap();
        assert_eq!(config.inputs.movies, Some(PathBuf::from("data/movies.list")));
        assert_eq!(config.build.year_min, 1995);
        assert_eq!(config.build.country, "Canada");
        assert_eq!(config.build.min_votes, 500);
        assert_eq!(config.seed, 42);
        assert_eq!(config.params.seed, 42);
        assert_eq!(config.build.rank_scope, RankScope::Candidates);
        assert!(!config.params.use_gain_ratio);
    }

    #[test]
    fn unknown_keys_are_rejected_with_the_line_number() {
        let mut config = RunConfig::default();
        let err = config.apply_file("seed=1\nmovie = typo.list\n").unwrap_err();
        let ConfigError::Line { line, reason } = err;
        assert_eq!(line, 2);
        assert!(reason.contains("unknown key"));
    }

    #[test]
    fn malformed_lines_are_rejected() {
        let mut config = RunConfig::default();
        let err = config.apply_file("just some words\n").unwrap_err();
        let ConfigError::Line { line, .. } = err;
        assert_eq!(line, 1);
    }

    #[test]
    fn bad_values_are_rejected() {
        let mut config = RunConfig::default();
        assert!(config.set("year_min", "soon").is_err());
        assert!(config.set("prune_fraction", "1.5").is_err());
        assert!(config.set("use_gain_ratio", "maybe").is_err());
        assert!(config.set("rank_scope", "global").is_err());
    }

    #[test]
    fn echo_lists_settings_but_no_paths() {
        let mut config = RunConfig::default();
        config.set("movies", "/secret/place/movies.list").unwrap();
        let echo = config.echo();
        assert!(echo.contains("year_min=2000"));
        assert!(echo.contains("seed=1"));
        assert!(!echo.contains("secret"));
        assert!(!echo.contains("out"));
    }
}
