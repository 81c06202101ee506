//! Feature engineering: the fixed-width numeric matrix over feature groups
//! F1–F11, the bag-of-words alternative for the text blocks, and
//! train-fitted standardization.
//!
//! Group layout for the full representation (width 16 + 2·dim):
//! F1 month, F2 category one-hot (8), F3 year, F4 text token count,
//! F5 dominant-sponsor flag, F6 legislator flag, F7 title token count,
//! F8 pooled title vector (dim), F9 reference_year − year, F10 election-year
//! flag, F11 pooled text vector (dim).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{BillRecord, Outcome, SponsorKind};
use crate::embeddings::{pool_average, tokenize, EmbeddingTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    /// Real-valued column; z-scored by the scaler.
    Scalar,
    /// 0/1 indicator; passes through the scaler.
    Binary,
    /// One-hot block; passes through the scaler.
    OneHot,
    /// Pooled word-vector block; passes through the scaler.
    Embedding,
    /// Token-count block (bag of words); passes through the scaler.
    Counts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureGroup {
    /// Group code, e.g. "F1".
    pub name: String,
    /// Human-readable label, e.g. "Month".
    pub label: String,
    pub start: usize,
    pub len: usize,
    pub kind: GroupKind,
}

/// Ordered, named feature groups with contiguous column spans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    groups: Vec<FeatureGroup>,
    width: usize,
}

impl FeatureSchema {
    fn build(parts: Vec<(&str, &str, usize, GroupKind)>) -> FeatureSchema {
        let mut groups = Vec::with_capacity(parts.len());
        let mut start = 0usize;
        for (name, label, len, kind) in parts {
            groups.push(FeatureGroup {
                name: name.to_string(),
                label: label.to_string(),
                start,
                len,
                kind,
            });
            start += len;
        }
        FeatureSchema {
            groups,
            width: start,
        }
    }

    /// The paper's full feature set F1–F11.
    pub fn engineered_wordvec(dim: usize) -> FeatureSchema {
        FeatureSchema::build(vec![
            ("F1", "Month", 1, GroupKind::Scalar),
            ("F2", "Label", 8, GroupKind::OneHot),
            ("F3", "YearIntroduced", 1, GroupKind::Scalar),
            ("F4", "TextLength", 1, GroupKind::Scalar),
            ("F5", "Sponsor1", 1, GroupKind::Binary),
            ("F6", "Sponsor2", 1, GroupKind::Binary),
            ("F7", "TitleLength", 1, GroupKind::Scalar),
            ("F8", "TitleWordVector", dim, GroupKind::Embedding),
            ("F9", "YearDifference", 1, GroupKind::Scalar),
            ("F10", "ElectionYear", 1, GroupKind::Binary),
            ("F11", "TextWordVectors", dim, GroupKind::Embedding),
        ])
    }

    /// Scalar features only; the word-vector blocks are dropped.
    pub fn engineered() -> FeatureSchema {
        FeatureSchema::build(vec![
            ("F1", "Month", 1, GroupKind::Scalar),
            ("F2", "Label", 8, GroupKind::OneHot),
            ("F3", "YearIntroduced", 1, GroupKind::Scalar),
            ("F4", "TextLength", 1, GroupKind::Scalar),
            ("F5", "Sponsor1", 1, GroupKind::Binary),
            ("F6", "Sponsor2", 1, GroupKind::Binary),
            ("F7", "TitleLength", 1, GroupKind::Scalar),
            ("F9", "YearDifference", 1, GroupKind::Scalar),
            ("F10", "ElectionYear", 1, GroupKind::Binary),
        ])
    }

    /// Scalar features plus a bag-of-words block replacing the word vectors.
    pub fn bow(vocab_len: usize) -> FeatureSchema {
        FeatureSchema::build(vec![
            ("F1", "Month", 1, GroupKind::Scalar),
            ("F2", "Label", 8, GroupKind::OneHot),
            ("F3", "YearIntroduced", 1, GroupKind::Scalar),
            ("F4", "TextLength", 1, GroupKind::Scalar),
            ("F5", "Sponsor1", 1, GroupKind::Binary),
            ("F6", "Sponsor2", 1, GroupKind::Binary),
            ("F7", "TitleLength", 1, GroupKind::Scalar),
            ("F9", "YearDifference", 1, GroupKind::Scalar),
            ("F10", "ElectionYear", 1, GroupKind::Binary),
            ("BOW", "BagOfWords", vocab_len, GroupKind::Counts),
        ])
    }

    /// Single anonymous scalar block; used for raw numeric matrices in
    /// training internals and tests.
    pub fn raw(width: usize) -> FeatureSchema {
        FeatureSchema::build(vec![("X", "Raw", width, GroupKind::Scalar)])
    }

    /// Arbitrary group layout; spans are assigned contiguously in order.
    pub fn custom(parts: &[(&str, &str, usize, GroupKind)]) -> FeatureSchema {
        FeatureSchema::build(parts.to_vec())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn groups(&self) -> &[FeatureGroup] {
        &self.groups
    }

    pub fn group(&self, name: &str) -> Option<&FeatureGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    /// Columns the scaler standardizes: every Scalar group.
    pub fn scaled_columns(&self) -> Vec<usize> {
        let mut cols = Vec::new();
        for g in &self.groups {
            if g.kind == GroupKind::Scalar {
                cols.extend(g.start..g.start + g.len);
            }
        }
        cols
    }
}

/// Dense row-major matrix with optional 0/1 labels (1 = enacted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub schema: FeatureSchema,
    rows: usize,
    width: usize,
    values: Vec<f64>,
    pub labels: Option<Vec<u8>>,
}

impl FeatureMatrix {
    pub fn new(schema: FeatureSchema) -> FeatureMatrix {
        let width = schema.width();
        FeatureMatrix {
            schema,
            rows: 0,
            width,
            values: Vec::new(),
            labels: None,
        }
    }

    pub fn from_rows(schema: FeatureSchema, rows: Vec<Vec<f64>>) -> Result<FeatureMatrix> {
        let mut m = FeatureMatrix::new(schema);
        for row in rows {
            m.push_row(&row)?;
        }
        Ok(m)
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.width {
            return Err(Error::config(format!(
                "row width {} does not match schema width {}",
                row.len(),
                self.width
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric("non-finite feature value"));
        }
        self.values.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.width)
    }

    /// New matrix containing the given rows, labels subset alongside.
    pub fn subset(&self, indices: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(indices.len() * self.width);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            schema: self.schema.clone(),
            rows: indices.len(),
            width: self.width,
            values,
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
        }
    }

    pub fn labels_or_err(&self) -> Result<&[u8]> {
        self.labels
            .as_deref()
            .ok_or_else(|| Error::config("matrix has no labels"))
    }
}

/// Featurization settings; part of the run configuration and persisted with
/// trained models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub election_years: BTreeSet<i32>,
    pub reference_year: i32,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            election_years: BTreeSet::from([2013, 2017]),
            reference_year: 2019,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BowConfig {
    pub min_freq: usize,
    pub max_vocab: usize,
}

impl Default for BowConfig {
    fn default() -> Self {
        BowConfig {
            min_freq: 2,
            max_vocab: 5000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    #[serde(rename = "engineered")]
    Engineered,
    #[serde(rename = "engineered+wordvec")]
    EngineeredWordvec,
    #[serde(rename = "bow")]
    Bow,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Engineered => "engineered",
            Representation::EngineeredWordvec => "engineered+wordvec",
            Representation::Bow => "bow",
        }
    }
}

fn sponsor_is_dominant(name: &str) -> bool {
    let normalized = name.split_whitespace().collect::<Vec<_>>().join(" ");
    normalized.to_lowercase() == "aden duale"
}

fn scalar_features(record: &BillRecord, cfg: &FeatureConfig) -> ScalarFeatures {
    ScalarFeatures {
        month: record.month as f64,
        category_index: record.category.index(),
        year: record.year as f64,
        text_len: tokenize(&record.body).len() as f64,
        sponsor1: if sponsor_is_dominant(&record.sponsor_name) {
            1.0
        } else {
            0.0
        },
        sponsor2: if record.sponsor_kind == SponsorKind::Legislator {
            1.0
        } else {
            0.0
        },
        title_len: tokenize(&record.title).len() as f64,
        year_diff: (cfg.reference_year - record.year) as f64,
        election: if cfg.election_years.contains(&record.year) {
            1.0
        } else {
            0.0
        },
    }
}

struct ScalarFeatures {
    month: f64,
    category_index: usize,
    year: f64,
    text_len: f64,
    sponsor1: f64,
    sponsor2: f64,
    title_len: f64,
    year_diff: f64,
    election: f64,
}

impl ScalarFeatures {
    fn push_prefix(&self, out: &mut Vec<f64>) {
        out.push(self.month);
        let mut one_hot = [0.0; 8];
        one_hot[self.category_index] = 1.0;
        out.extend_from_slice(&one_hot);
        out.push(self.year);
        out.push(self.text_len);
        out.push(self.sponsor1);
        out.push(self.sponsor2);
        out.push(self.title_len);
    }

    fn push_suffix(&self, out: &mut Vec<f64>) {
        out.push(self.year_diff);
        out.push(self.election);
    }
}

/// Feature vector of one record under the full F1–F11 layout.
pub fn featurize(record: &BillRecord, table: &EmbeddingTable, cfg: &FeatureConfig) -> Vec<f64> {
    let s = scalar_features(record, cfg);
    let mut out = Vec::with_capacity(16 + 2 * table.dim());
    s.push_prefix(&mut out);
    out.extend(pool_average(&tokenize(&record.title), table));
    s.push_suffix(&mut out);
    out.extend(pool_average(&tokenize(&record.body), table));
    out
}

/// Bag-of-words vocabulary and count blocks built from the training records
/// only; test records are counted against the same vocabulary.
///
/// Documents are title and body tokens combined. Tokens below `min_freq`
/// are dropped; if more than `max_vocab` remain, the most frequent are kept
/// (ties toward the lexicographically smaller token). Columns are in
/// alphabetical token order.
pub fn featurize_bow(
    train: &[BillRecord],
    test: &[BillRecord],
    cfg: &BowConfig,
) -> Result<(FeatureMatrix, FeatureMatrix, Vec<String>)> {
    let docs =
        |records: &[BillRecord]| -> Vec<Vec<String>> {
            records
                .iter()
                .map(|r| {
                    let mut tokens = tokenize(&r.title);
                    tokens.extend(tokenize(&r.body));
                    tokens
                })
                .collect()
        };
    let train_docs = docs(train);
    let test_docs = docs(test);

    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in &train_docs {
        for token in doc {
            *freq.entry(token).or_insert(0) += 1;
        }
    }
    let mut kept: Vec<(&str, usize)> = freq
        .into_iter()
        .filter(|&(_, count)| count >= cfg.min_freq)
        .collect();
    if kept.is_empty() {
        return Err(Error::config(
            "empty bag-of-words vocabulary; lower bow_min_freq or supply more text",
        ));
    }
    if kept.len() > cfg.max_vocab {
        kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        kept.truncate(cfg.max_vocab);
    }
    let mut vocab: Vec<String> = kept.into_iter().map(|(t, _)| t.to_string()).collect();
    vocab.sort();

    let index: HashMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();

    let count_rows = |docs: &[Vec<String>]| -> Vec<Vec<f64>> {
        docs.iter()
            .map(|doc| {
                let mut row = vec![0.0; vocab.len()];
                for token in doc {
                    if let Some(&col) = index.get(token.as_str()) {
                        row[col] += 1.0;
                    }
                }
                row
            })
            .collect()
    };

    let labels_of = |records: &[BillRecord]| -> Option<Vec<u8>> {
        records
            .iter()
            .map(|r| match r.outcome {
                Outcome::Enacted => Some(1u8),
                Outcome::NotEnacted => Some(0u8),
                Outcome::Unknown => None,
            })
            .collect()
    };

    let schema = FeatureSchema::build(vec![("BOW", "BagOfWords", vocab.len(), GroupKind::Counts)]);
    let mut train_m = FeatureMatrix::from_rows(schema.clone(), count_rows(&train_docs))?;
    train_m.labels = labels_of(train);
    let mut test_m = FeatureMatrix::from_rows(schema, count_rows(&test_docs))?;
    test_m.labels = labels_of(test);
    Ok((train_m, test_m, vocab))
}

/// A representation bound to everything it needs to featurize records:
/// config, schema, and (depending on the representation) an embedding table
/// or a frozen bag-of-words vocabulary.
#[derive(Debug, Clone)]
pub struct FeatureSpace {
    pub representation: Representation,
    pub config: FeatureConfig,
    pub schema: FeatureSchema,
    embeddings: Option<EmbeddingTable>,
    bow_vocab: Option<Vec<String>>,
    bow_index: Option<HashMap<String, usize>>,
}

impl FeatureSpace {
    pub fn engineered(config: FeatureConfig) -> FeatureSpace {
        FeatureSpace {
            representation: Representation::Engineered,
            config,
            schema: FeatureSchema::engineered(),
            embeddings: None,
            bow_vocab: None,
            bow_index: None,
        }
    }

    pub fn engineered_wordvec(config: FeatureConfig, table: EmbeddingTable) -> FeatureSpace {
        FeatureSpace {
            representation: Representation::EngineeredWordvec,
            config,
            schema: FeatureSchema::engineered_wordvec(table.dim()),
            embeddings: Some(table),
            bow_vocab: None,
            bow_index: None,
        }
    }

    /// Build the bag-of-words space; the vocabulary is fitted on `train`.
    pub fn bow(config: FeatureConfig, bow: &BowConfig, train: &[BillRecord]) -> Result<FeatureSpace> {
        let (_, _, vocab) = featurize_bow(train, &[], bow)?;
        Ok(FeatureSpace::bow_with_vocab(config, vocab))
    }

    /// Rebuild a bag-of-words space from a persisted vocabulary.
    pub fn bow_with_vocab(config: FeatureConfig, vocab: Vec<String>) -> FeatureSpace {
        let index = vocab
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        FeatureSpace {
            representation: Representation::Bow,
            config,
            schema: FeatureSchema::bow(vocab.len()),
            embeddings: None,
            bow_vocab: Some(vocab),
            bow_index: Some(index),
        }
    }

    pub fn bow_vocab(&self) -> Option<&[String]> {
        self.bow_vocab.as_deref()
    }

    pub fn embedding_dim(&self) -> Option<usize> {
        self.embeddings.as_ref().map(EmbeddingTable::dim)
    }

    /// Feature vector of one record under this representation.
    pub fn featurize(&self, record: &BillRecord) -> Vec<f64> {
        match self.representation {
            Representation::EngineeredWordvec => featurize(
                record,
                self.embeddings.as_ref().expect("embeddings present"),
                &self.config,
            ),
            Representation::Engineered => {
                let s = scalar_features(record, &self.config);
                let mut out = Vec::with_capacity(self.schema.width());
                s.push_prefix(&mut out);
                s.push_suffix(&mut out);
                out
            }
            Representation::Bow => {
                let s = scalar_features(record, &self.config);
                let mut out = Vec::with_capacity(self.schema.width());
                s.push_prefix(&mut out);
                s.push_suffix(&mut out);
                let index = self.bow_index.as_ref().expect("bow index present");
                let offset = out.len();
                out.resize(self.schema.width(), 0.0);
                let mut tokens = tokenize(&record.title);
                tokens.extend(tokenize(&record.body));
                for token in &tokens {
                    if let Some(&col) = index.get(token.as_str()) {
                        out[offset + col] += 1.0;
                    }
                }
                out
            }
        }
    }

    /// Featurize a whole record list. With `want_labels`, every outcome must
    /// be known and the label vector is attached.
    pub fn featurize_corpus(
        &self,
        records: &[BillRecord],
        want_labels: bool,
    ) -> Result<FeatureMatrix> {
        if records.is_empty() {
            return Err(Error::config("featurize_corpus: empty record list"));
        }
        let mut matrix = FeatureMatrix::new(self.schema.clone());
        let mut labels = Vec::with_capacity(records.len());
        for record in records {
            matrix.push_row(&self.featurize(record))?;
            if want_labels {
                match record.outcome {
                    Outcome::Enacted => labels.push(1u8),
                    Outcome::NotEnacted => labels.push(0u8),
                    Outcome::Unknown => {
                        return Err(Error::config(format!(
                            "record {:?} has unknown outcome; training/evaluation corpora need \
                             labels",
                            record.id
                        )));
                    }
                }
            }
        }
        if want_labels {
            matrix.labels = Some(labels);
        }
        Ok(matrix)
    }
}

/// Per-column standardization parameters fitted on training data.
/// Only Scalar-kind columns are transformed; constant columns store std 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    width: usize,
    columns: Vec<usize>,
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl Scaler {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }
}

/// Fit column means and population standard deviations on the designated
/// scalar columns of the training matrix.
pub fn fit_scaler(train: &FeatureMatrix) -> Result<Scaler> {
    if train.rows() == 0 {
        return Err(Error::config("fit_scaler: empty matrix"));
    }
    let columns = train.schema.scaled_columns();
    let n = train.rows() as f64;
    let mut means = Vec::with_capacity(columns.len());
    let mut stds = Vec::with_capacity(columns.len());
    for &col in &columns {
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for row in train.iter_rows() {
            sum += row[col];
            min = min.min(row[col]);
            max = max.max(row[col]);
        }
        let mean = sum / n;
        let std = if max == min {
            1.0
        } else {
            let var = train
                .iter_rows()
                .map(|row| (row[col] - mean).powi(2))
                .sum::<f64>()
                / n;
            var.sqrt()
        };
        means.push(mean);
        stds.push(if std > 0.0 { std } else { 1.0 });
    }
    Ok(Scaler {
        width: train.width(),
        columns,
        means,
        stds,
    })
}

/// Z-score the scaler's columns; all other columns pass through. The input
/// is not mutated.
pub fn apply_scaler(scaler: &Scaler, matrix: &FeatureMatrix) -> Result<FeatureMatrix> {
    if scaler.width != matrix.width() {
        return Err(Error::config(format!(
            "scaler width {} does not match matrix width {}",
            scaler.width,
            matrix.width()
        )));
    }
    let mut out = matrix.clone();
    for i in 0..out.rows {
        let base = i * out.width;
        for (k, &col) in scaler.columns.iter().enumerate() {
            out.values[base + col] = (out.values[base + col] - scaler.means[k]) / scaler.stds[k];
        }
    }
    Ok(out)
}
