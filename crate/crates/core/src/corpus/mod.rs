//! Bill record data model, corpus file parsing, and descriptive statistics.
//!
//! Corpus files are UTF-8, one JSON object per line with the fixed field
//! order `id, title, text, sponsor, sponsor_kind, label, year, month,
//! enacted`. `enacted` is `true`, `false`, or `null` (outcome unknown).

mod synth;

pub use synth::{
    generate_synthetic_corpus, rule_score, GeneratorConfig, RuleWeights, SyntheticCorpus,
};

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The eight opaque category labels bills are tagged with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
    L7,
    L8,
}

impl Category {
    pub const ALL: [Category; 8] = [
        Category::L1,
        Category::L2,
        Category::L3,
        Category::L4,
        Category::L5,
        Category::L6,
        Category::L7,
        Category::L8,
    ];

    /// Zero-based position used for one-hot encoding.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Category> {
        Category::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::L1 => "L1",
            Category::L2 => "L2",
            Category::L3 => "L3",
            Category::L4 => "L4",
            Category::L5 => "L5",
            Category::L6 => "L6",
            Category::L7 => "L7",
            Category::L8 => "L8",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SponsorKind {
    Legislator,
    Executive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Enacted,
    NotEnacted,
    Unknown,
}

impl Outcome {
    fn from_wire(enacted: Option<bool>) -> Outcome {
        match enacted {
            Some(true) => Outcome::Enacted,
            Some(false) => Outcome::NotEnacted,
            None => Outcome::Unknown,
        }
    }

    fn to_wire(self) -> Option<bool> {
        match self {
            Outcome::Enacted => Some(true),
            Outcome::NotEnacted => Some(false),
            Outcome::Unknown => None,
        }
    }
}

/// One bill: metadata, text, and outcome label. The unit of ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BillRecord {
    pub id: String,
    pub title: String,
    pub body: String,
    pub sponsor_name: String,
    pub sponsor_kind: SponsorKind,
    pub category: Category,
    pub year: i32,
    pub month: u32,
    pub outcome: Outcome,
}

impl BillRecord {
    /// First invariant violation, if any. Checked on every parsed line and
    /// on generator output.
    pub fn check(&self) -> std::result::Result<(), String> {
        if !(1..=12).contains(&self.month) {
            return Err(format!("month out of range ({})", self.month));
        }
        if !(1900..=2100).contains(&self.year) {
            return Err(format!("year out of range ({})", self.year));
        }
        if self.title.trim().is_empty() {
            return Err("title is empty".to_string());
        }
        Ok(())
    }
}

/// Wire form of one corpus line; field order here is the output order.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineRecord {
    id: String,
    title: String,
    text: String,
    sponsor: String,
    sponsor_kind: SponsorKind,
    label: Category,
    year: i32,
    month: u32,
    enacted: Option<bool>,
}

impl From<&BillRecord> for LineRecord {
    fn from(r: &BillRecord) -> Self {
        LineRecord {
            id: r.id.clone(),
            title: r.title.clone(),
            text: r.body.clone(),
            sponsor: r.sponsor_name.clone(),
            sponsor_kind: r.sponsor_kind,
            label: r.category,
            year: r.year,
            month: r.month,
            enacted: r.outcome.to_wire(),
        }
    }
}

impl From<LineRecord> for BillRecord {
    fn from(l: LineRecord) -> Self {
        BillRecord {
            id: l.id,
            title: l.title,
            body: l.text,
            sponsor_name: l.sponsor,
            sponsor_kind: l.sponsor_kind,
            category: l.label,
            year: l.year,
            month: l.month,
            outcome: Outcome::from_wire(l.enacted),
        }
    }
}

/// Parse a corpus from a string. `source` names the input in diagnostics.
///
/// The whole parse fails if any line is bad; the error lists every offending
/// line (malformed JSON, invariant violations, duplicate ids).
pub fn parse_corpus_str(source: &str, content: &str) -> Result<Vec<BillRecord>> {
    let mut records = Vec::new();
    let mut issues: Vec<String> = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();

    for (idx, line) in content.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            issues.push(format!("line {lineno}: empty line"));
            continue;
        }
        match serde_json::from_str::<LineRecord>(line) {
            Err(e) => issues.push(format!("line {lineno}: malformed record: {e}")),
            Ok(wire) => {
                let record: BillRecord = wire.into();
                if let Err(msg) = record.check() {
                    issues.push(format!("line {lineno}: {msg}"));
                    continue;
                }
                if let Some(first) = seen.get(&record.id) {
                    issues.push(format!(
                        "line {lineno}: duplicate id {:?} (first seen on line {first})",
                        record.id
                    ));
                    continue;
                }
                seen.insert(record.id.clone(), lineno);
                records.push(record);
            }
        }
    }

    if issues.is_empty() {
        Ok(records)
    } else {
        Err(Error::parse(format!(
            "{source}: {} invalid line(s):\n  {}",
            issues.len(),
            issues.join("\n  ")
        )))
    }
}

/// Parse a corpus file. See [`parse_corpus_str`].
pub fn parse_corpus(path: &Path) -> Result<Vec<BillRecord>> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_corpus_str(&path.display().to_string(), &content)
}

/// Serialize records to the line format, one JSON object per line, fields in
/// the fixed wire order. `parse_corpus_str` inverts this exactly.
pub fn serialize_corpus(records: &[BillRecord]) -> String {
    let mut out = String::new();
    for record in records {
        let wire = LineRecord::from(record);
        // Struct-to-JSON cannot fail for these field types.
        out.push_str(&serde_json::to_string(&wire).expect("corpus line serialization"));
        out.push('\n');
    }
    out
}

pub fn write_corpus(path: &Path, records: &[BillRecord]) -> Result<()> {
    std::fs::write(path, serialize_corpus(records))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub count: usize,
    pub enacted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopSponsor {
    pub name: String,
    /// Fraction of all bills introduced by this sponsor.
    pub share: f64,
}

/// Descriptive corpus statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total: usize,
    pub enacted: usize,
    pub not_enacted: usize,
    pub unknown: usize,
    pub per_category: BTreeMap<Category, CategoryCount>,
    pub per_year: BTreeMap<i32, usize>,
    pub top_sponsor: TopSponsor,
}

/// Exact counts over the record list. Errors on an empty list.
///
/// Ties for the top sponsor break toward the lexicographically smallest name.
pub fn corpus_stats(records: &[BillRecord]) -> Result<CorpusStats> {
    if records.is_empty() {
        return Err(Error::config("corpus_stats: empty record list"));
    }

    let mut enacted = 0usize;
    let mut not_enacted = 0usize;
    let mut unknown = 0usize;
    let mut per_category: BTreeMap<Category, CategoryCount> = BTreeMap::new();
    let mut per_year: BTreeMap<i32, usize> = BTreeMap::new();
    let mut per_sponsor: BTreeMap<&str, usize> = BTreeMap::new();

    for r in records {
        match r.outcome {
            Outcome::Enacted => enacted += 1,
            Outcome::NotEnacted => not_enacted += 1,
            Outcome::Unknown => unknown += 1,
        }
        let cat = per_category.entry(r.category).or_insert(CategoryCount {
            count: 0,
            enacted: 0,
        });
        cat.count += 1;
        if r.outcome == Outcome::Enacted {
            cat.enacted += 1;
        }
        *per_year.entry(r.year).or_insert(0) += 1;
        *per_sponsor.entry(r.sponsor_name.as_str()).or_insert(0) += 1;
    }

    let (&name, &count) = per_sponsor
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .expect("non-empty sponsor map");

    Ok(CorpusStats {
        total: records.len(),
        enacted,
        not_enacted,
        unknown,
        per_category,
        per_year,
        top_sponsor: TopSponsor {
            name: name.to_string(),
            share: count as f64 / records.len() as f64,
        },
    })
}

#[cfg(test)]
pub(crate) fn test_record(id: &str) -> BillRecord {
    BillRecord {
        id: id.to_string(),
        title: "The Finance Bill, 2018".to_string(),
        body: "a bill to amend the law relating to taxes".to_string(),
        sponsor_name: "Aden Duale".to_string(),
        sponsor_kind: SponsorKind::Legislator,
        category: Category::L1,
        year: 2018,
        month: 4,
        outcome: Outcome::NotEnacted,
    }
}
