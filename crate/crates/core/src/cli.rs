//! Subcommand implementations behind the `billfate` binary.
//!
//! Every subcommand is a pure function of its input files, configuration,
//! and seeds: reruns write byte-identical outputs (no timestamps, no
//! wall-clock seeding). Exit codes: 0 success, 1 I/O, 2 config, 3 parse,
//! 4 numeric, 5 integrity.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::RunConfig;
use crate::corpus::{corpus_stats, generate_synthetic_corpus, parse_corpus, write_corpus};
use crate::embeddings::{tokenize, EmbeddingTable};
use crate::error::{Error, Result};
use crate::evaluation::{render_per_class, render_table};
use crate::persist::save_model;
use crate::pipeline::{
    ablation_pipeline, evaluate_pipeline, importance_pipeline, predict_pipeline, train_pipeline,
};

#[derive(Debug, Parser)]
#[command(
    name = "billfate",
    about = "Predicts whether a parliamentary bill will be enacted",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Corpus statistics: class balance, per-year histogram, per-category
    /// enacted percentages, top sponsor.
    Stats {
        #[arg(long)]
        config: PathBuf,
        /// Write the stats as JSON to this file as well.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the full pipeline and persist the stacked model.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Override the model output path from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a persisted model: Table-style metrics plus the per-class
    /// breakdown, as text and JSON.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        /// Model file (defaults to the config's output.model).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Directory for report files (defaults to output.report_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a batch of bills with a persisted model.
    Predict {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Bills to score (corpus line format; outcomes may be null).
        #[arg(long)]
        bills: PathBuf,
        /// Write predictions as JSON to this file as well.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grouped permutation feature importance plus the weight-mass
    /// diagnostic.
    Importance {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the importance seed from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Paired with/without-SMOTE runs with per-metric deltas.
    Ablation {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus from the config's [synth] section.
    Synth {
        #[arg(long)]
        config: PathBuf,
        /// Corpus output path (defaults next to the config's corpus path).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the generator seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write a synthetic embedding table covering the generated
        /// vocabulary (dimension from [embeddings].dim).
        #[arg(long)]
        embeddings_out: Option<PathBuf>,
    },
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::io(parent.display().to_string(), e))?;
        }
    }
    std::fs::write(path, content).map_err(|e| Error::io(path.display().to_string(), e))
}

fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report serializes");
    out.push('\n');
    out
}

pub fn cmd_stats(config_path: &Path, out: Option<&Path>) -> Result<()> {
    let config = RunConfig::load(config_path)?;
    let records = parse_corpus(&config.data.corpus)?;
    let stats = corpus_stats(&records)?;

    let mut text = String::new();
    text.push_str(&format!(
        "total {}  enacted {}  not_enacted {}  unknown {}\n",
        stats.total, stats.enacted, stats.not_enacted, stats.unknown
    ));
    text.push_str(&format!(
        "top sponsor: {} ({:.1}% of bills)\n",
        stats.top_sponsor.name,
        stats.top_sponsor.share * 100.0
    ));
    text.push_str("\nper-year histogram:\n");
    let max_count = stats.per_year.values().copied().max().unwrap_or(1);
    for (year, count) in &stats.per_year {
        let bar = "#".repeat((count * 40).div_ceil(max_count.max(1)));
        text.push_str(&format!("  {year}  {count:>4}  {bar}\n"));
    }
    text.push_str("\nper-category distribution (share of corpus, enacted% / not-enacted%):\n");
    for (category, c) in &stats.per_category {
        let share = c.count as f64 / stats.total as f64 * 100.0;
        let enacted_pct = if c.count > 0 {
            c.enacted as f64 / c.count as f64 * 100.0
        } else {
            0.0
        };
        text.push_str(&format!(
            "  {category}  {share:>5.1}%  enacted {enacted_pct:>5.1}% / not enacted {:>5.1}%\n",
            100.0 - enacted_pct
        ));
    }
    print!("{text}");

    if let Some(out) = out {
        write_text(out, &to_json_pretty(&stats))?;
    }
    Ok(())
}

pub fn cmd_train(config_path: &Path, out: Option<&Path>) -> Result<()> {
    let config = RunConfig::load(config_path)?;
    let trained = train_pipeline(&config)?;
    let model_path = out.unwrap_or(&config.output.model);
    if let Some(parent) = model_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::io(parent.display().to_string(), e))?;
        }
    }
    save_model(model_path, &trained.payload)?;
    print!("{}", trained.summary);
    println!("model written to {}", model_path.display());
    Ok(())
}

/// Combined JSON document for one evaluation run.
#[derive(Serialize)]
struct EvaluationDocument<'a> {
    model_id: &'a str,
    reports: &'a [crate::evaluation::EvaluationReport],
}

pub fn cmd_evaluate(config_path: &Path, model: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let config = RunConfig::load(config_path)?;
    let model_path = model.unwrap_or(&config.output.model);
    let eval = evaluate_pipeline(&config, model_path)?;

    let table = render_table(&eval.reports);
    let per_class = render_per_class(&eval.reports);
    let text = format!("{table}\nper-class breakdown:\n{per_class}");
    print!("{text}");

    let dir = out.unwrap_or(&config.output.report_dir);
    write_text(&dir.join("evaluation.txt"), &text)?;
    write_text(
        &dir.join("evaluation.json"),
        &to_json_pretty(&EvaluationDocument {
            model_id: &eval.model_id,
            reports: &eval.reports,
        }),
    )?;
    Ok(())
}

pub fn cmd_predict(
    config_path: &Path,
    model: Option<&Path>,
    bills: &Path,
    out: Option<&Path>,
) -> Result<()> {
    let config = RunConfig::load(config_path)?;
    let model_path = model.unwrap_or(&config.output.model);
    let predictions = predict_pipeline(&config, model_path, bills)?;
    let mut text = String::new();
    for p in &predictions {
        text.push_str(&format!("{}\t{:.6}\t{}\n", p.id, p.probability, p.label));
    }
    print!("{text}");
    if let Some(out) = out {
        write_text(out, &to_json_pretty(&predictions))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ImportanceDocument<'a> {
    model_id: &'a str,
    metric: &'a str,
    permutation: &'a [crate::evaluation::GroupImportance],
    weight_mass: &'a [(String, f64)],
}

pub fn cmd_importance(
    config_path: &Path,
    model: Option<&Path>,
    out: Option<&Path>,
    seed: Option<u64>,
) -> Result<()> {
    let config = RunConfig::load(config_path)?;
    let model_path = model.unwrap_or(&config.output.model);
    let importance = importance_pipeline(&config, model_path, seed)?;

    let mut text = String::new();
    text.push_str("permutation importance (macro F1 drop), ranked:\n");
    text.push_str(&format!(
        "{:<6} {:<18} {:>10} {:>10}\n",
        "group", "label", "mean", "std"
    ));
    for g in &importance.permutation {
        text.push_str(&format!(
            "{:<6} {:<18} {:>10.6} {:>10.6}\n",
            g.group, g.label, g.mean, g.std
        ));
    }
    text.push_str("\nabsolute weight mass per group (base-learner diagnostic):\n");
    for (group, mass) in &importance.weight_mass {
        text.push_str(&format!("{group:<6} {mass:>10.6}\n"));
    }
    print!("{text}");

    let dir = out.unwrap_or(&config.output.report_dir);
    write_text(&dir.join("importance.txt"), &text)?;
    write_text(
        &dir.join("importance.json"),
        &to_json_pretty(&ImportanceDocument {
            model_id: &importance.model_id,
            metric: "macro_f1",
            permutation: &importance.permutation,
            weight_mass: &importance.weight_mass,
        }),
    )?;
    Ok(())
}

pub fn cmd_ablation(config_path: &Path, out: Option<&Path>) -> Result<()> {
    let config = RunConfig::load(config_path)?;
    let report = ablation_pipeline(&config)?;
    let text = report.render();
    print!("{text}");
    let dir = out.unwrap_or(&config.output.report_dir);
    write_text(&dir.join("ablation.txt"), &text)?;
    write_text(&dir.join("ablation.json"), &to_json_pretty(&report))?;
    Ok(())
}

pub fn cmd_synth(
    config_path: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
    embeddings_out: Option<&Path>,
) -> Result<()> {
    let config = RunConfig::load(config_path)?;
    let generator = config.synth.generator_config()?;
    let seed = seed.unwrap_or(config.synth.seed);
    let corpus = generate_synthetic_corpus(&generator, seed)?;
    let out_path = out.map(Path::to_path_buf).unwrap_or_else(|| {
        config
            .data
            .corpus
            .clone()
    });
    write_corpus(&out_path, &corpus.records)?;
    let stats = corpus_stats(&corpus.records)?;
    println!(
        "wrote {} records to {} ({} enacted, rule threshold {:.6}, seed {seed})",
        stats.total,
        out_path.display(),
        stats.enacted,
        corpus.threshold
    );

    if let Some(emb_path) = embeddings_out {
        let mut vocab: BTreeMap<String, ()> = BTreeMap::new();
        for r in &corpus.records {
            for t in tokenize(&r.title).into_iter().chain(tokenize(&r.body)) {
                vocab.insert(t, ());
            }
        }
        let tokens: Vec<&str> = vocab.keys().map(String::as_str).collect();
        let table = EmbeddingTable::synthetic(&tokens, config.embeddings.dim, seed);
        table.write_text(emb_path)?;
        println!(
            "wrote {}-dim embeddings for {} tokens to {}",
            config.embeddings.dim,
            tokens.len(),
            emb_path.display()
        );
    }
    Ok(())
}

/// Dispatch a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stats { config, out } => cmd_stats(&config, out.as_deref()),
        Command::Train { config, out } => cmd_train(&config, out.as_deref()),
        Command::Evaluate { config, model, out } => {
            cmd_evaluate(&config, model.as_deref(), out.as_deref())
        }
        Command::Predict {
            config,
            model,
            bills,
            out,
        } => cmd_predict(&config, model.as_deref(), &bills, out.as_deref()),
        Command::Importance {
            config,
            model,
            out,
            seed,
        } => cmd_importance(&config, model.as_deref(), out.as_deref(), seed),
        Command::Ablation { config, out } => cmd_ablation(&config, out.as_deref()),
        Command::Synth {
            config,
            out,
            seed,
            embeddings_out,
        } => cmd_synth(&config, out.as_deref(), seed, embeddings_out.as_deref()),
    }
}
