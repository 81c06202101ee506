//! Word-vector table loading and average pooling of token vectors.
//!
//! The file format is GloVe-style text: one line per token, the token
//! followed by `dim` whitespace-separated decimal numbers.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::DetRng;

/// Token → dense vector map of fixed dimension.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    entries: HashMap<String, Vec<f64>>,
    duplicate_warnings: usize,
}

impl EmbeddingTable {
    pub fn from_entries<I, S>(dim: usize, entries: I) -> Result<EmbeddingTable>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut map = HashMap::new();
        let mut duplicate_warnings = 0usize;
        for (token, vector) in entries {
            let token = token.into();
            if token.is_empty() {
                return Err(Error::config("embedding token must be non-empty"));
            }
            if vector.len() != dim {
                return Err(Error::config(format!(
                    "embedding for {token:?} has {} values, expected {dim}",
                    vector.len()
                )));
            }
            if map.contains_key(&token) {
                duplicate_warnings += 1;
                continue;
            }
            map.insert(token, vector);
        }
        Ok(EmbeddingTable {
            dim,
            entries: map,
            duplicate_warnings,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab_size(&self) -> usize {
        self.entries.len()
    }

    /// Number of duplicate tokens skipped at load time (first occurrence
    /// kept).
    pub fn duplicate_warnings(&self) -> usize {
        self.duplicate_warnings
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.entries.get(token).map(Vec::as_slice)
    }

    /// Text form of the table, tokens in sorted order, numbers printed with
    /// full round-trip precision so load(to_text()) is bit-exact.
    pub fn to_text(&self) -> String {
        let mut tokens: Vec<&String> = self.entries.keys().collect();
        tokens.sort();
        let mut out = String::new();
        for token in tokens {
            out.push_str(token);
            for v in &self.entries[token] {
                out.push(' ');
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_text(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Random table over a fixed vocabulary, components uniform in [-1, 1).
    /// Handy for synthetic-corpus runs.
    pub fn synthetic(vocab: &[&str], dim: usize, seed: u64) -> EmbeddingTable {
        let mut rng = DetRng::new(seed, 0);
        let entries = vocab.iter().map(|token| {
            let vector: Vec<f64> = (0..dim).map(|_| rng.uniform() * 2.0 - 1.0).collect();
            (token.to_string(), vector)
        });
        EmbeddingTable::from_entries(dim, entries).expect("synthetic table is well-formed")
    }
}

/// Parse a GloVe-style text table. Fails on the first malformed line.
pub fn parse_embeddings(source: &str, content: &str, expected_dim: usize) -> Result<EmbeddingTable> {
    if expected_dim == 0 {
        return Err(Error::config("embedding dimension must be positive"));
    }
    let mut entries = HashMap::new();
    let mut duplicate_warnings = 0usize;

    for (idx, line) in content.lines().enumerate() {
        let lineno = idx + 1;
        let mut fields = line.split_whitespace();
        let token = match fields.next() {
            Some(t) => t,
            None => {
                return Err(Error::parse(format!("{source}: line {lineno}: empty line")));
            }
        };
        let mut vector = Vec::with_capacity(expected_dim);
        for field in fields {
            let value: f64 = field.parse().map_err(|_| {
                Error::parse(format!(
                    "{source}: line {lineno}: unparseable number {field:?}"
                ))
            })?;
            vector.push(value);
        }
        if vector.len() != expected_dim {
            return Err(Error::parse(format!(
                "{source}: line {lineno}: expected {expected_dim} values, found {}",
                vector.len()
            )));
        }
        if entries.contains_key(token) {
            duplicate_warnings += 1;
            continue;
        }
        entries.insert(token.to_string(), vector);
    }

    Ok(EmbeddingTable {
        dim: expected_dim,
        entries,
        duplicate_warnings,
    })
}

/// Load a GloVe-style embedding file.
pub fn load_embeddings(path: &Path, expected_dim: usize) -> Result<EmbeddingTable> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_embeddings(&path.display().to_string(), &content, expected_dim)
}

/// Lowercase tokens, split on every maximal run of non-alphanumeric
/// characters. Empty input gives an empty list.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(|s| s.to_lowercase())
        .collect()
}

/// Arithmetic mean of the vectors of in-vocabulary tokens. Out-of-vocabulary
/// tokens are skipped; if nothing is in vocabulary the zero vector is
/// returned.
pub fn pool_average(tokens: &[String], table: &EmbeddingTable) -> Vec<f64> {
    let mut sum = vec![0.0; table.dim()];
    let mut used = 0usize;
    for token in tokens {
        if let Some(vector) = table.get(token) {
            for (s, v) in sum.iter_mut().zip(vector) {
                *s += v;
            }
            used += 1;
        }
    }
    if used > 0 {
        for s in &mut sum {
            *s /= used as f64;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_line_file_loads() {
        let table = parse_embeddings("test", "the 0.1 0.2 0.3\nbill 1 2 3\n", 3).unwrap();
        assert_eq!(table.vocab_size(), 2);
        assert_eq!(table.dim(), 3);
        assert_eq!(table.get("bill"), Some(&[1.0, 2.0, 3.0][..]));
    }

    #[test]
    fn dimension_mismatch_reports_line() {
        let content = format!("ok {}\nshort 1 2\n", vec!["0.5"; 100].join(" "));
        let err = parse_embeddings("test", &content, 100).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("expected 100 values, found 2"), "{msg}");
    }

    #[test]
    fn unparseable_number_is_an_error() {
        let err = parse_embeddings("test", "tok 1.0 oops 3.0\n", 3).unwrap_err();
        assert!(err.to_string().contains("unparseable number"));
    }

    #[test]
    fn duplicates_keep_first_and_count() {
        let table = parse_embeddings("test", "a 1 2\nb 3 4\na 9 9\n", 2).unwrap();
        assert_eq!(table.vocab_size(), 2);
        assert_eq!(table.duplicate_warnings(), 1);
        assert_eq!(table.get("a"), Some(&[1.0, 2.0][..]));
    }

    #[test]
    fn tokenize_applies_stated_rule() {
        assert_eq!(
            tokenize("The Finance Bill, 2018"),
            vec!["the", "finance", "bill", "2018"]
        );
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(tokenize("a--b"), vec!["a", "b"]);
    }

    #[test]
    fn pooling_single_token_is_identity() {
        let table =
            EmbeddingTable::from_entries(3, vec![("x", vec![0.5, -1.0, 2.0])]).unwrap();
        let pooled = pool_average(&["x".to_string()], &table);
        assert_eq!(pooled, vec![0.5, -1.0, 2.0]);
    }

    #[test]
    fn pooling_averages_componentwise() {
        let table = EmbeddingTable::from_entries(
            2,
            vec![("v", vec![1.0, 0.0]), ("w", vec![0.0, 1.0])],
        )
        .unwrap();
        let pooled = pool_average(&["v".to_string(), "w".to_string()], &table);
        assert_eq!(pooled, vec![0.5, 0.5]);
    }

    #[test]
    fn all_oov_gives_zero_vector() {
        let table = EmbeddingTable::from_entries(4, vec![("x", vec![1.0; 4])]).unwrap();
        let pooled = pool_average(&["y".to_string(), "z".to_string()], &table);
        assert_eq!(pooled, vec![0.0; 4]);
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let table = EmbeddingTable::synthetic(&["alpha", "beta", "gamma"], 5, 99);
        let text = table.to_text();
        let reloaded = parse_embeddings("test", &text, 5).unwrap();
        for token in ["alpha", "beta", "gamma"] {
            assert_eq!(table.get(token), reloaded.get(token), "{token}");
        }
        assert_eq!(text, reloaded.to_text());
    }
}
