//! Run configuration: a single TOML file with full defaulting.
//!
//! Every paper-unspecified hyperparameter lives here with its default, and
//! the effective (fully defaulted) config is echoed and digested so each
//! run's provenance is visible. All randomness flows from the named seeds
//! below; nothing is seeded from the clock.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{GeneratorConfig, RuleWeights};
use crate::error::{Error, Result};
use crate::features::{BowConfig, FeatureConfig, Representation};
use crate::models::Hyper;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    /// Corpus file (JSON lines).
    pub corpus: PathBuf,
    /// Optional explicit test corpus; when set, evaluation uses this whole
    /// file instead of re-splitting the training corpus.
    pub test_corpus: Option<PathBuf>,
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection {
            corpus: PathBuf::from("corpus.jsonl"),
            test_corpus: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingsSection {
    pub path: PathBuf,
    pub dim: usize,
}

impl Default for EmbeddingsSection {
    fn default() -> Self {
        EmbeddingsSection {
            path: PathBuf::from("embeddings.txt"),
            dim: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesSection {
    pub representation: Representation,
    pub election_years: Vec<i32>,
    pub reference_year: i32,
    pub bow_min_freq: usize,
    pub bow_max_vocab: usize,
}

impl Default for FeaturesSection {
    fn default() -> Self {
        FeaturesSection {
            representation: Representation::EngineeredWordvec,
            election_years: vec![2013, 2017],
            reference_year: 2019,
            bow_min_freq: 2,
            bow_max_vocab: 5000,
        }
    }
}

impl FeaturesSection {
    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            election_years: self.election_years.iter().copied().collect(),
            reference_year: self.reference_year,
        }
    }

    pub fn bow_config(&self) -> BowConfig {
        BowConfig {
            min_freq: self.bow_min_freq,
            max_vocab: self.bow_max_vocab,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub ratio: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection {
            ratio: 0.7,
            seed: 17,
            stratified: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoteSection {
    pub enabled: bool,
    pub k_neighbors: usize,
    /// Minority-to-majority ratio to oversample to; omit for full
    /// equalization.
    pub target_ratio: Option<f64>,
    pub seed: u64,
}

impl Default for SmoteSection {
    fn default() -> Self {
        SmoteSection {
            enabled: true,
            k_neighbors: 5,
            target_ratio: None,
            seed: 23,
        }
    }
}

impl SmoteSection {
    pub fn smote_config(&self) -> crate::resampling::SmoteConfig {
        crate::resampling::SmoteConfig {
            k_neighbors: self.k_neighbors,
            target: match self.target_ratio {
                Some(r) => crate::resampling::SmoteTarget::Ratio(r),
                None => crate::resampling::SmoteTarget::Equalize,
            },
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerSection {
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub max_iters: usize,
    pub tolerance: f64,
}

impl Default for LearnerSection {
    fn default() -> Self {
        LearnerSection {
            learning_rate: 0.1,
            l2_lambda: 0.01,
            max_iters: 5000,
            tolerance: 1e-7,
        }
    }
}

impl LearnerSection {
    pub fn hyper(&self, seed: u64) -> Hyper {
        Hyper {
            learning_rate: self.learning_rate,
            l2_lambda: self.l2_lambda,
            max_iters: self.max_iters,
            tolerance: self.tolerance,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StackSection {
    pub folds: usize,
    pub seed: u64,
}

impl Default for StackSection {
    fn default() -> Self {
        StackSection { folds: 5, seed: 31 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImportanceSection {
    pub n_repeats: usize,
    pub seed: u64,
}

impl Default for ImportanceSection {
    fn default() -> Self {
        ImportanceSection {
            n_repeats: 10,
            seed: 41,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    /// p ≥ threshold predicts enacted.
    pub threshold: f64,
}

impl Default for EvaluateSection {
    fn default() -> Self {
        EvaluateSection { threshold: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub model: PathBuf,
    pub report_dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            model: PathBuf::from("model.json"),
            report_dir: PathBuf::from("reports"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub total: usize,
    pub minority_ratio: f64,
    pub noise: f64,
    pub year_min: i32,
    pub year_max: i32,
    pub duale_share: f64,
    pub margin: f64,
    /// "mixed" or "month-only".
    pub rule: String,
    pub seed: u64,
}

impl Default for SynthSection {
    fn default() -> Self {
        SynthSection {
            total: 460,
            minority_ratio: 65.0 / 460.0,
            noise: 0.0,
            year_min: 2009,
            year_max: 2019,
            duale_share: 0.24,
            margin: 0.03,
            rule: "mixed".to_string(),
            seed: 7,
        }
    }
}

impl SynthSection {
    pub fn generator_config(&self) -> Result<GeneratorConfig> {
        let rule = match self.rule.as_str() {
            "mixed" => RuleWeights::mixed(),
            "month-only" => RuleWeights::month_only(),
            other => {
                return Err(Error::config(format!(
                    "unknown synth rule {other:?}; expected \"mixed\" or \"month-only\""
                )));
            }
        };
        Ok(GeneratorConfig {
            total: self.total,
            minority_ratio: self.minority_ratio,
            noise: self.noise,
            year_min: self.year_min,
            year_max: self.year_max,
            duale_share: self.duale_share,
            margin: self.margin,
            rule,
            ..GeneratorConfig::default()
        })
    }
}

/// The whole run configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataSection,
    pub embeddings: EmbeddingsSection,
    pub features: FeaturesSection,
    pub split: SplitSection,
    pub smote: SmoteSection,
    pub logistic: LearnerSection,
    pub svm: LearnerSection,
    pub stack: StackSection,
    pub importance: ImportanceSection,
    pub evaluate: EvaluateSection,
    pub output: OutputSection,
    pub synth: SynthSection,
}

impl RunConfig {
    pub fn from_str_toml(source: &str, content: &str) -> Result<RunConfig> {
        let config: RunConfig = toml::from_str(content)
            .map_err(|e| Error::config(format!("{source}: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut config = RunConfig::from_str_toml(&path.display().to_string(), &content)?;
        // Relative data paths resolve against the config file's directory.
        if let Some(dir) = path.parent() {
            config.resolve_paths(dir);
        }
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.data.corpus);
        if let Some(test) = self.data.test_corpus.as_mut() {
            fix(test);
        }
        fix(&mut self.embeddings.path);
        fix(&mut self.output.model);
        fix(&mut self.output.report_dir);
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.split.ratio > 0.0 && self.split.ratio < 1.0) {
            return Err(Error::config(format!(
                "split.ratio must be in (0, 1), got {}",
                self.split.ratio
            )));
        }
        if self.embeddings.dim == 0 {
            return Err(Error::config("embeddings.dim must be positive"));
        }
        if self.smote.k_neighbors == 0 {
            return Err(Error::config("smote.k_neighbors must be at least 1"));
        }
        if self.stack.folds < 2 {
            return Err(Error::config("stack.folds must be at least 2"));
        }
        if self.importance.n_repeats == 0 {
            return Err(Error::config("importance.n_repeats must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.evaluate.threshold) {
            return Err(Error::config(format!(
                "evaluate.threshold must be in [0, 1], got {}",
                self.evaluate.threshold
            )));
        }
        for (name, learner) in [("logistic", &self.logistic), ("svm", &self.svm)] {
            if learner.learning_rate <= 0.0 || learner.max_iters == 0 {
                return Err(Error::config(format!(
                    "{name}: learning_rate must be positive and max_iters at least 1"
                )));
            }
            if learner.l2_lambda < 0.0 || learner.tolerance < 0.0 {
                return Err(Error::config(format!(
                    "{name}: l2_lambda and tolerance must be non-negative"
                )));
            }
        }
        Ok(())
    }

    /// Fully defaulted TOML echo of this configuration.
    pub fn effective_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Digest binding reports to the configuration that produced them.
    pub fn digest(&self) -> String {
        let bytes = Sha256::digest(self.effective_toml().as_bytes());
        hex_string(&bytes)
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_defaults_everything() {
        let config = RunConfig::from_str_toml("test", "[data]\ncorpus = \"bills.jsonl\"\n").unwrap();
        assert_eq!(config.split.ratio, 0.7);
        assert_eq!(config.smote.k_neighbors, 5);
        assert_eq!(config.logistic.max_iters, 5000);
        assert_eq!(config.stack.folds, 5);
        assert_eq!(config.features.representation, Representation::EngineeredWordvec);
        assert_eq!(config.data.corpus, PathBuf::from("bills.jsonl"));
    }

    #[test]
    fn bad_values_are_rejected() {
        for toml in [
            "[split]\nratio = 1.5\n",
            "[embeddings]\ndim = 0\n",
            "[smote]\nk_neighbors = 0\n",
            "[stack]\nfolds = 1\n",
            "[logistic]\nlearning_rate = 0.0\n",
        ] {
            assert!(RunConfig::from_str_toml("test", toml).is_err(), "{toml}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_str_toml("test", "[split]\nratioo = 0.5\n").is_err());
        assert!(RunConfig::from_str_toml("test", "[splitt]\n").is_err());
    }

    #[test]
    fn effective_toml_round_trips_and_digest_is_stable() {
        let a = RunConfig::default();
        let echo = a.effective_toml();
        let b = RunConfig::from_str_toml("echo", &echo).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.digest(), b.digest());
        let mut c = RunConfig::default();
        c.split.seed = 999;
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn synth_rule_names_map_to_rule_weights() {
        let mut s = SynthSection::default();
        assert_eq!(s.generator_config().unwrap().rule, RuleWeights::mixed());
        s.rule = "month-only".to_string();
        assert_eq!(s.generator_config().unwrap().rule, RuleWeights::month_only());
        s.rule = "nope".to_string();
        assert!(s.generator_config().is_err());
    }
}
