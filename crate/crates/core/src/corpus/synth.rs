//! Synthetic corpus generator.
//!
//! Desk-scale stand-in for the real bill corpus: records are drawn from
//! seeded distributions and labelled by a known linear rule over their
//! engineered features, so pipeline quality and importance rankings can be
//! checked against ground truth.
//!
//! The generator guarantees an exact class split under the rule: after an
//! initial draw it picks the score threshold at the requested quantile, then
//! re-draws any record whose score falls inside the margin band around the
//! threshold, keeping it on its assigned side. Labels are then flipped
//! independently with probability `noise`.

use serde::{Deserialize, Serialize};

use crate::corpus::{BillRecord, Category, Outcome, SponsorKind};
use crate::error::{Error, Result};
use crate::rng::{streams, DetRng};

/// Weights of the linear labelling rule. Each term multiplies a feature of
/// the record normalized with fixed constants (see [`rule_score`]), so the
/// score is a pure function of one record plus this config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleWeights {
    pub month: f64,
    pub category: [f64; 8],
    pub year: f64,
    pub election: f64,
    pub sponsor1: f64,
    pub sponsor2: f64,
    pub title_len: f64,
    pub text_len: f64,
}

impl RuleWeights {
    /// Signal spread over several feature groups; category dominates, with
    /// month and year next, so the score distribution is strongly bimodal
    /// and the margin band separates dense clusters rather than thin tails.
    pub fn mixed() -> RuleWeights {
        RuleWeights {
            month: 1.0,
            category: [1.8, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9, -1.0],
            year: 0.6,
            election: 0.5,
            sponsor1: 0.4,
            sponsor2: 0.3,
            title_len: 0.25,
            text_len: -0.2,
        }
    }

    /// Only the month carries signal; everything else is inert. Used to
    /// sanity-check importance rankings.
    pub fn month_only() -> RuleWeights {
        RuleWeights {
            month: 1.0,
            category: [0.0; 8],
            year: 0.0,
            election: 0.0,
            sponsor1: 0.0,
            sponsor2: 0.0,
            title_len: 0.0,
            text_len: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Number of records; must be at least 10.
    pub total: usize,
    /// Fraction of records labelled enacted by the rule, in (0, 1).
    pub minority_ratio: f64,
    /// Per-record label flip probability after rule labelling.
    pub noise: f64,
    pub year_min: i32,
    pub year_max: i32,
    /// Relative weights of the eight category labels.
    pub category_weights: [f64; 8],
    /// Probability that a bill is sponsored by the dominant sponsor.
    pub duale_share: f64,
    /// Probability of an executive (rather than legislator) sponsor.
    pub executive_share: f64,
    /// Election years feeding the rule's election flag.
    pub election_years: Vec<i32>,
    /// Half-width of the score band around the threshold that is kept clear
    /// of records, as a fraction of the observed score range.
    pub margin: f64,
    pub rule: RuleWeights,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            total: 460,
            minority_ratio: 65.0 / 460.0,
            noise: 0.0,
            year_min: 2009,
            year_max: 2019,
            category_weights: [0.22, 0.18, 0.14, 0.12, 0.10, 0.09, 0.08, 0.07],
            duale_share: 0.24,
            executive_share: 0.18,
            election_years: vec![2013, 2017],
            margin: 0.03,
            rule: RuleWeights::mixed(),
        }
    }
}

/// Generator output: the records plus the realized score threshold, so the
/// labelling rule can be re-applied by callers.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub records: Vec<BillRecord>,
    pub threshold: f64,
}

const DOMINANT_SPONSOR: &str = "Aden Duale";

const SPONSOR_POOL: [&str; 20] = [
    "A. Mwangi",
    "B. Otieno",
    "C. Wanjiku",
    "D. Kiprono",
    "E. Achieng",
    "F. Njoroge",
    "G. Mutua",
    "H. Chebet",
    "I. Omondi",
    "J. Kamau",
    "K. Nyambura",
    "L. Barasa",
    "M. Wafula",
    "N. Auma",
    "O. Kilonzo",
    "P. Jepkorir",
    "Q. Maina",
    "R. Adhiambo",
    "S. Koech",
    "T. Nafula",
];

const TITLE_TOPICS: [&str; 16] = [
    "finance",
    "health",
    "education",
    "land",
    "water",
    "county",
    "tax",
    "energy",
    "transport",
    "security",
    "elections",
    "budget",
    "agriculture",
    "housing",
    "labour",
    "trade",
];

const TITLE_QUALIFIERS: [&str; 8] = [
    "amendment",
    "appropriation",
    "management",
    "authority",
    "commission",
    "regulation",
    "development",
    "protection",
];

const BODY_WORDS: [&str; 32] = [
    "act",
    "parliament",
    "provide",
    "establish",
    "amend",
    "repeal",
    "section",
    "county",
    "national",
    "fund",
    "board",
    "public",
    "officer",
    "service",
    "levy",
    "licence",
    "authority",
    "commission",
    "regulation",
    "framework",
    "gazette",
    "assembly",
    "senate",
    "committee",
    "schedule",
    "provision",
    "penalty",
    "revenue",
    "governance",
    "oversight",
    "procurement",
    "devolution",
];

/// Linear rule score of one record. Pure function of (record, config); the
/// normalizing constants are fixed so the rule can be re-applied verbatim.
pub fn rule_score(record: &BillRecord, cfg: &GeneratorConfig) -> f64 {
    let w = &cfg.rule;
    let month = (record.month as f64 - 6.5) / 3.452;
    let half_span = ((cfg.year_max - cfg.year_min) as f64 / 2.0).max(1.0);
    let year = (record.year as f64 - (cfg.year_min + cfg.year_max) as f64 / 2.0) / half_span;
    let election = if cfg.election_years.contains(&record.year) {
        1.0
    } else {
        0.0
    };
    let sponsor1 = if record.sponsor_name == DOMINANT_SPONSOR {
        1.0
    } else {
        0.0
    };
    let sponsor2 = if record.sponsor_kind == SponsorKind::Legislator {
        1.0
    } else {
        0.0
    };
    let title_len = (crate::embeddings::tokenize(&record.title).len() as f64 - 6.0) / 3.0;
    let text_len = (crate::embeddings::tokenize(&record.body).len() as f64 - 70.0) / 35.0;

    w.month * month
        + w.category[record.category.index()]
        + w.year * year
        + w.election * election
        + w.sponsor1 * sponsor1
        + w.sponsor2 * sponsor2
        + w.title_len * title_len
        + w.text_len * text_len
}

fn draw_fields(rng: &mut DetRng, cfg: &GeneratorConfig) -> BillRecord {
    let year = rng.range_i64(cfg.year_min as i64, cfg.year_max as i64) as i32;
    let month = rng.below(12) as u32 + 1;
    let category = Category::from_index(rng.weighted(&cfg.category_weights)).unwrap();

    let (sponsor_name, sponsor_kind) = if rng.uniform() < cfg.duale_share {
        (DOMINANT_SPONSOR.to_string(), SponsorKind::Legislator)
    } else {
        let name = SPONSOR_POOL[rng.below(SPONSOR_POOL.len() as u64) as usize].to_string();
        let kind = if rng.uniform() < cfg.executive_share {
            SponsorKind::Executive
        } else {
            SponsorKind::Legislator
        };
        (name, kind)
    };

    let n_topics = 1 + rng.below(3) as usize;
    let mut title = String::from("The");
    for _ in 0..n_topics {
        title.push(' ');
        let t = TITLE_TOPICS[rng.below(TITLE_TOPICS.len() as u64) as usize];
        let mut chars = t.chars();
        let first = chars.next().unwrap().to_uppercase().to_string();
        title.push_str(&first);
        title.push_str(chars.as_str());
    }
    if rng.uniform() < 0.5 {
        let q = TITLE_QUALIFIERS[rng.below(TITLE_QUALIFIERS.len() as u64) as usize];
        title.push_str(&format!(" ({q})"));
    }
    title.push_str(&format!(" Bill, {year}"));

    let body_len = 30 + rng.below(80) as usize;
    let mut body_words = Vec::with_capacity(body_len);
    for _ in 0..body_len {
        body_words.push(BODY_WORDS[rng.below(BODY_WORDS.len() as u64) as usize]);
    }
    let body = body_words.join(" ");

    BillRecord {
        id: String::new(),
        title,
        body,
        sponsor_name,
        sponsor_kind,
        category,
        year,
        month,
        outcome: Outcome::Unknown,
    }
}

/// Deterministic synthetic corpus for the given config and seed.
pub fn generate_synthetic_corpus(cfg: &GeneratorConfig, seed: u64) -> Result<SyntheticCorpus> {
    if cfg.total < 10 {
        return Err(Error::config(format!(
            "synthetic corpus needs at least 10 records, got {}",
            cfg.total
        )));
    }
    if !(cfg.minority_ratio > 0.0 && cfg.minority_ratio < 1.0) {
        return Err(Error::config(format!(
            "minority ratio must be in (0, 1), got {}",
            cfg.minority_ratio
        )));
    }
    if !(0.0..=1.0).contains(&cfg.noise) {
        return Err(Error::config(format!(
            "noise must be in [0, 1], got {}",
            cfg.noise
        )));
    }
    if cfg.year_min > cfg.year_max || cfg.year_min < 1900 || cfg.year_max > 2100 {
        return Err(Error::config("year range must lie within [1900, 2100]"));
    }

    let mut rng = DetRng::new(seed, streams::SYNTH);
    let n = cfg.total;
    let minority = ((n as f64) * cfg.minority_ratio).round() as usize;
    let minority = minority.clamp(1, n - 1);
    let majority = n - minority;

    let mut records: Vec<BillRecord> = (0..n).map(|_| draw_fields(&mut rng, cfg)).collect();

    let mut scores: Vec<f64> = records.iter().map(|r| rule_score(r, cfg)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));

    let lo_score = scores[order[0]];
    let hi_score = scores[order[n - 1]];
    let range = hi_score - lo_score;
    if range <= 0.0 {
        return Err(Error::config(
            "labelling rule produced a constant score; give some feature a nonzero weight",
        ));
    }
    let threshold = (scores[order[majority - 1]] + scores[order[majority]]) / 2.0;
    let band = cfg.margin * range;

    // Re-draw records that sit inside the margin band, pinning each to the
    // side of the threshold its quantile position assigned it.
    for (pos, &idx) in order.iter().enumerate() {
        let keep_low = pos < majority;
        let mut attempts = 0u32;
        loop {
            let s = scores[idx];
            let ok = if keep_low {
                s <= threshold - band
            } else {
                s >= threshold + band
            };
            if ok {
                break;
            }
            attempts += 1;
            if attempts > 10_000 {
                return Err(Error::numeric(
                    "synthetic generator could not satisfy the margin; lower `margin` or \
                     rebalance the rule weights",
                ));
            }
            records[idx] = draw_fields(&mut rng, cfg);
            scores[idx] = rule_score(&records[idx], cfg);
        }
    }

    // Assign ids, rule labels, and noise flips in original index order.
    for (i, record) in records.iter_mut().enumerate() {
        record.id = format!("SB-{i:04}");
        let rule_label = scores[i] > threshold;
        let flip = rng.uniform() < cfg.noise;
        let enacted = rule_label != flip;
        record.outcome = if enacted {
            Outcome::Enacted
        } else {
            Outcome::NotEnacted
        };
        debug_assert!(record.check().is_ok());
    }

    Ok(SyntheticCorpus { records, threshold })
}
