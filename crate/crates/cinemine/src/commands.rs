//! Command-line entry points.
//!
//! Exit codes are a stable contract: 0 success, 1 runtime failure (bad
//! input data, I/O trouble mid-run), 2 usage or validation error. Every
//! artifact a command writes is a pure function of (inputs, config, seed);
//! none embeds a filesystem path, so reruns compare byte-identical.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::corr::{correlate_dataset2, scatter_plot, trend_line, CorrError, PairedSeries};
use crate::dataset::{
    build_dataset1, build_dataset2, load_dataset, save_dataset, Dataset, PopularityClass,
};
use crate::eval::{cross_validate, render_report, EvalError, Learner, ReportFormat};
use crate::ingest::{
    build_store, load_store, parse_attributes, parse_boxoffice_csv, parse_credits, parse_movies,
    parse_ratings, read_text, save_store, AttributeKind, CreditRole, MovieStore, StoreInputs,
};
use crate::learn::part::{part_learn_with_rng, render_rules};
use crate::learn::tree::{render_tree, train_tree_with_rng};
use crate::learn::{rank_attributes, Table};

#[derive(Parser)]
#[command(name = "cinemine", version, about = "Movie-popularity mining pipeline")]
struct Cli {
    /// Key=value config file applied before the flags below
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice in the run
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for the store and all artifacts
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cross-validation fold count
    #[arg(long, global = true)]
    folds: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the configured list files into a store directory
    Ingest,
    /// Build a dataset CSV from the store
    Build {
        /// 1 = pre-release dataset, 2 = financial dataset
        #[arg(long)]
        dataset: u8,
    },
    /// Cross-validate a learner on a dataset CSV
    Evaluate {
        /// c45 or part
        #[arg(long)]
        learner: String,
        dataset: PathBuf,
    },
    /// Rank a dataset's features by information gain
    Rank { dataset: PathBuf },
    /// Correlate budget with each earnings column and plot
    Correlate { dataset: PathBuf },
}

#[derive(Debug)]
pub enum CommandError {
    Usage(String),
    Runtime(String),
}

fn usage(e: impl std::fmt::Display) -> CommandError {
    CommandError::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CommandError {
    CommandError::Runtime(e.to_string())
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(CommandError::Usage(msg)) => {
            eprintln!("cinemine: {msg}");
            2
        }
        Err(CommandError::Runtime(msg)) => {
            eprintln!("cinemine: {msg}");
            1
        }
    }
}

fn execute(cli: Cli) -> Result<(), CommandError> {
    let config = effective_config(&cli)?;
    match &cli.command {
        Command::Ingest => cmd_ingest(&config),
        Command::Build { dataset } => cmd_build(&config, *dataset),
        Command::Evaluate { learner, dataset } => cmd_evaluate(&config, learner, dataset),
        Command::Rank { dataset } => cmd_rank(&config, dataset),
        Command::Correlate { dataset } => cmd_correlate(&config, dataset),
    }
}

/// defaults < config file < command-line flags.
fn effective_config(cli: &Cli) -> Result<RunConfig, CommandError> {
    let mut config = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = read_text(path).map_err(usage)?;
        config.apply_file(&text).map_err(usage)?;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
        config.params.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    if let Some(folds) = cli.folds {
        config.folds = folds;
    }
    Ok(config)
}

fn write_artifact(path: &Path, text: &str) -> Result<(), CommandError> {
    std::fs::write(path, text).map_err(|e| runtime(format!("writing {}: {e}", path.display())))
}

/// Textual artifacts end with the effective settings, so a reader can always
/// tell which configuration produced a file. Machine formats (CSV, JSON,
/// SVG, the store tables) stay pure; the echo lives in the sibling report.
fn with_echo(text: &str, config: &RunConfig) -> String {
    format!("{text}\n{}", config.echo())
}

fn ensure_out_dir(config: &RunConfig) -> Result<(), CommandError> {
    std::fs::create_dir_all(&config.out)
        .map_err(|e| runtime(format!("creating {}: {e}", config.out.display())))
}

fn read_input(path: &Path) -> Result<String, CommandError> {
    read_text(path).map_err(usage)
}

fn cmd_ingest(config: &RunConfig) -> Result<(), CommandError> {
    let (Some(movies_path), Some(ratings_path)) =
        (&config.inputs.movies, &config.inputs.ratings)
    else {
        return Err(usage(
            "ingest needs at least movies= and ratings= in the config",
        ));
    };

    let mut inputs = StoreInputs::default();
    let mut summary = String::new();

    let movies = parse_movies(&read_input(movies_path)?).map_err(runtime)?;
    summary.push_str(&format!(
        "movies: {} parsed, {} skipped\n",
        movies.stats.parsed, movies.stats.skipped
    ));
    inputs.movies = movies.records;

    let ratings = parse_ratings(&read_input(ratings_path)?).map_err(runtime)?;
    summary.push_str(&format!(
        "ratings: {} parsed, {} skipped\n",
        ratings.stats.parsed, ratings.stats.skipped
    ));
    inputs.ratings = ratings.records;

    let credit_files = [
        ("directors", &config.inputs.directors, CreditRole::Director),
        ("actors", &config.inputs.actors, CreditRole::Actor),
        ("actresses", &config.inputs.actresses, CreditRole::Actress),
    ];
    for (label, path, role) in credit_files {
        if let Some(path) = path {
            let parsed = parse_credits(&read_input(path)?, role).map_err(runtime)?;
            summary.push_str(&format!(
                "{label}: {} parsed, {} skipped\n",
                parsed.stats.parsed, parsed.stats.skipped
            ));
            inputs.credits.extend(parsed.records);
        }
    }

    let attribute_files = [
        ("countries", &config.inputs.countries, AttributeKind::Country),
        ("languages", &config.inputs.languages, AttributeKind::Language),
        ("business", &config.inputs.business, AttributeKind::BudgetLine),
    ];
    for (label, path, kind) in attribute_files {
        if let Some(path) = path {
            let parsed = parse_attributes(&read_input(path)?, kind).map_err(runtime)?;
            summary.push_str(&format!(
                "{label}: {} parsed, {} skipped\n",
                parsed.stats.parsed, parsed.stats.skipped
            ));
            inputs.attributes.extend(parsed.records);
        }
    }

    if let Some(path) = &config.inputs.boxoffice {
        let records = parse_boxoffice_csv(&read_input(path)?).map_err(runtime)?;
        summary.push_str(&format!("boxoffice: {} rows\n", records.len()));
        inputs.finances = records;
    }

    let (store, drops) = build_store(inputs);
    summary.push_str(&format!(
        "dropped without a movie entry: {} ratings, {} credits, {} attributes, {} finances\n",
        drops.ratings, drops.credits, drops.attributes, drops.finances
    ));
    summary.push_str(&store_line(&store));

    let store_dir = config.out.join("store");
    save_store(&store, &store_dir).map_err(runtime)?;
    let summary = with_echo(&summary, config);
    write_artifact(&store_dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn store_line(store: &MovieStore) -> String {
    let attributes: usize = store.attributes.values().map(Vec::len).sum();
    format!(
        "store: {} movies, {} ratings, {} credits, {} attributes, {} finances\n",
        store.movies.len(),
        store.ratings.len(),
        store.credits.len(),
        attributes,
        store.finances.len()
    )
}

fn cmd_build(config: &RunConfig, which: u8) -> Result<(), CommandError> {
    let builder = match which {
        1 => build_dataset1,
        2 => build_dataset2,
        _ => return Err(usage(format!("--dataset must be 1 or 2, got {which}"))),
    };
    let store_dir = config.out.join("store");
    if !store_dir.is_dir() {
        return Err(usage("no store directory yet; run ingest first"));
    }
    let store = load_store(&store_dir).map_err(runtime)?;
    let dataset = builder(&store, &config.build).map_err(runtime)?;
    if dataset.instances.is_empty() {
        eprintln!("warning: dataset {which} came out empty under the current filters");
    }

    ensure_out_dir(config)?;
    save_dataset(&dataset, &config.out.join(format!("dataset{which}.csv"))).map_err(runtime)?;
    let summary = build_summary(&dataset, config);
    write_artifact(
        &config.out.join(format!("dataset{which}_summary.txt")),
        &summary,
    )?;
    print!("{summary}");
    Ok(())
}

fn build_summary(dataset: &Dataset, config: &RunConfig) -> String {
    let counts = dataset.class_counts();
    let mut out = String::new();
    out.push_str(&format!("{:<10}  {:>9}\n", "class", "instances"));
    for class in PopularityClass::ALL {
        out.push_str(&format!(
            "{:<10}  {:>9}\n",
            class.label(),
            counts[class.index()]
        ));
    }
    out.push_str(&format!("{:<10}  {:>9}\n", "total", dataset.instances.len()));
    out.push('\n');
    out.push_str(&config.echo());
    out
}

fn load_input_dataset(path: &Path) -> Result<Dataset, CommandError> {
    if !path.is_file() {
        return Err(usage(format!("no dataset file at {}", path.display())));
    }
    load_dataset(path).map_err(runtime)
}

fn cmd_evaluate(config: &RunConfig, learner_id: &str, dataset_path: &Path) -> Result<(), CommandError> {
    let learner = Learner::from_id(learner_id)
        .ok_or_else(|| usage(format!("unknown learner {learner_id:?}; expected c45 or part")))?;
    let dataset = load_input_dataset(dataset_path)?;
    let report = cross_validate(learner, &dataset, config.folds, config.seed, &config.params)
        .map_err(|e| match e {
            EvalError::TooFewFolds(_) | EvalError::TooManyFolds { .. } => usage(e),
            other => runtime(other),
        })?;

    // The shipped model retrains on everything; rng stream k+1 keeps it
    // independent of every fold's stream.
    let table = Table::from_dataset(&dataset);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(config.folds as u64 + 1);
    let rendering = match learner {
        Learner::C45 => render_tree(
            &train_tree_with_rng(&table, &config.params, &mut rng),
            &table.feature_names,
        ),
        Learner::Part => render_rules(
            &part_learn_with_rng(&table, &config.params, &mut rng),
            &table.feature_names,
        ),
    };
    let model = format!("features: {}\n{rendering}", table.feature_names.join(","));

    ensure_out_dir(config)?;
    let plain = with_echo(&render_report(&report, ReportFormat::Plain), config);
    let id = learner.id();
    write_artifact(&config.out.join(format!("{id}_report.txt")), &plain)?;
    write_artifact(
        &config.out.join(format!("{id}_report.json")),
        &render_report(&report, ReportFormat::Json),
    )?;
    write_artifact(&config.out.join(format!("{id}_model.txt")), &with_echo(&model, config))?;
    print!("{plain}");
    println!("accuracy: {:.4}", report.accuracy);
    Ok(())
}

fn cmd_rank(config: &RunConfig, dataset_path: &Path) -> Result<(), CommandError> {
    let dataset = load_input_dataset(dataset_path)?;
    let table = Table::from_dataset(&dataset);
    if table.feature_names.is_empty() {
        return Err(usage("dataset has no feature columns to rank"));
    }
    let ranking = rank_attributes(&table);
    let mut text = format!("{:<18}  {:>9}  {:>7}\n", "attribute", "gain_bits", "percent");
    for row in &ranking {
        text.push_str(&format!(
            "{:<18}  {:>9.4}  {:>7.2}\n",
            row.name, row.gain, row.percent
        ));
    }
    ensure_out_dir(config)?;
    let text = with_echo(&text, config);
    write_artifact(&config.out.join("rank.txt"), &text)?;
    print!("{text}");
    Ok(())
}

fn cmd_correlate(config: &RunConfig, dataset_path: &Path) -> Result<(), CommandError> {
    let dataset = load_input_dataset(dataset_path)?;
    let report = correlate_dataset2(&dataset).map_err(|e| match e {
        CorrError::MissingColumn(_) => usage(e),
        other => runtime(other),
    })?;

    ensure_out_dir(config)?;
    let plain = with_echo(&report.render_plain(), config);
    write_artifact(&config.out.join("correlation_report.txt"), &plain)?;
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    write_artifact(&config.out.join("correlation_report.json"), &json)?;

    for name in ["domestic", "foreign", "worldwide"] {
        let Some(series) = paired_series(&dataset, name) else {
            eprintln!("warning: not enough complete budget/{name} pairs to plot");
            continue;
        };
        let trend = match trend_line(&series) {
            Ok(trend) => trend,
            Err(_) => {
                eprintln!("warning: budget is constant; skipping the budget/{name} plot");
                continue;
            }
        };
        scatter_plot(&series, &trend, &config.out.join(format!("budget_{name}.svg")))
            .map_err(runtime)?;
    }
    print!("{plain}");
    Ok(())
}

fn paired_series(dataset: &Dataset, name: &str) -> Option<PairedSeries> {
    let budget = dataset.column_index("budget")?;
    let idx = dataset.column_index(name)?;
    PairedSeries::new(
        dataset
            .instances
            .iter()
            .map(|inst| (inst.values[budget].as_num(), inst.values[idx].as_num())),
        "budget",
        name,
    )
    .ok()
}
