//! Shared fixtures for the integration suites: synthetic corpora on disk,
//! matching embedding tables, and fast run configurations.

#![allow(dead_code)]

use std::path::Path;

use billfate::config::RunConfig;
use billfate::corpus::{
    generate_synthetic_corpus, write_corpus, BillRecord, GeneratorConfig, SyntheticCorpus,
};
use billfate::embeddings::{tokenize, EmbeddingTable};

/// Generator settings for the end-to-end experiments: the dominant category
/// concentrates score mass so the threshold cuts through a dense clump, and
/// the margin keeps a clear band around it.
pub fn acceptance_generator(noise: f64) -> GeneratorConfig {
    GeneratorConfig {
        margin: 0.15,
        noise,
        category_weights: [0.45, 0.14, 0.10, 0.08, 0.07, 0.06, 0.05, 0.05],
        ..GeneratorConfig::default()
    }
}

pub fn corpus_vocab(records: &[BillRecord]) -> Vec<String> {
    let mut vocab: Vec<String> = records
        .iter()
        .flat_map(|r| {
            let mut tokens = tokenize(&r.title);
            tokens.extend(tokenize(&r.body));
            tokens
        })
        .collect();
    vocab.sort();
    vocab.dedup();
    vocab
}

/// Write a corpus and a covering embedding table into `dir`; returns the
/// generated corpus for label inspection.
pub fn write_inputs(
    dir: &Path,
    generator: &GeneratorConfig,
    corpus_seed: u64,
    dim: usize,
) -> SyntheticCorpus {
    let corpus = generate_synthetic_corpus(generator, corpus_seed).expect("generator config valid");
    write_corpus(&dir.join("corpus.jsonl"), &corpus.records).expect("corpus written");
    let vocab = corpus_vocab(&corpus.records);
    let refs: Vec<&str> = vocab.iter().map(String::as_str).collect();
    EmbeddingTable::synthetic(&refs, dim, 5)
        .write_text(&dir.join("embeddings.txt"))
        .expect("embeddings written");
    corpus
}

/// Run configuration pointing at `write_inputs` artifacts, with iteration
/// caps low enough for test runtime budgets.
pub fn fast_config(dir: &Path, dim: usize) -> RunConfig {
    let mut config = RunConfig::default();
    config.data.corpus = dir.join("corpus.jsonl");
    config.embeddings.path = dir.join("embeddings.txt");
    config.embeddings.dim = dim;
    config.logistic.max_iters = 600;
    config.svm.max_iters = 600;
    config.output.model = dir.join("model.json");
    config.output.report_dir = dir.join("reports");
    config
}

/// Persist a config as TOML for binary-level runs.
pub fn write_config(path: &Path, config: &RunConfig) {
    std::fs::write(path, config.effective_toml()).expect("config written");
}
