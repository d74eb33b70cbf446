use std::collections::HashMap;

use serde::{Deserialize, Serialize, Serializer};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct TokenizerConfig {
    /// Lowercase every token.
    pub case_fold: bool,
    /// Treat an apostrophe between two letters as part of the word.
    pub keep_inner_apostrophes: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            case_fold: true,
            keep_inner_apostrophes: false,
        }
    }
}

/// Splits `text` into maximal runs of Unicode letters.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let joins = config.keep_inner_apostrophes
            && matches!(c, '\'' | '’')
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphabetic());
        if c.is_alphabetic() || joins {
            if config.case_fold {
                current.extend(c.to_lowercase());
            } else {
                current.push(c);
            }
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Word types ordered by decreasing count, ties broken lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedSpectrum {
    entries: Vec<(String, u64)>,
    total: u64,
}

impl RankedSpectrum {
    pub fn from_counts(counts: impl IntoIterator<Item = (String, u64)>) -> Result<Self> {
        let mut entries: Vec<(String, u64)> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        if entries.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let total = entries.iter().map(|(_, c)| c).sum();
        Ok(Self { entries, total })
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn levels(&self) -> usize {
        self.entries.len()
    }

    pub fn occupations(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, c)| *c as f64).collect()
    }
}

pub fn ingest(text: &str, config: &TokenizerConfig) -> Result<RankedSpectrum> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for token in tokenize(text, config) {
        *counts.entry(token).or_insert(0) += 1;
    }
    RankedSpectrum::from_counts(counts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    Infinite,
    /// Neither connective form occurs.
    Undefined,
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ratio::Finite(x) => s.serialize_f64(*x),
            Ratio::Infinite => s.serialize_str("infinite"),
            Ratio::Undefined => s.serialize_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConnectiveCount {
    pub word_x: String,
    pub word_y: String,
    pub and_count: u64,
    pub or_count: u64,
    pub ratio: Ratio,
}

/// Counts the ordered trigrams `X and Y` and `X or Y` in the token stream.
pub fn connective_ratio(corpus: &str, pairs: &[(String, String)], config: &TokenizerConfig) -> Vec<ConnectiveCount> {
    let tokens = tokenize(corpus, config);
    let norm = |w: &str| {
        let t = tokenize(w, config);
        t.join(" ")
    };
    pairs
        .iter()
        .map(|(x, y)| {
            let (x, y) = (norm(x), norm(y));
            let mut and_count = 0;
            let mut or_count = 0;
            for w in tokens.windows(3) {
                if w[0] == x && w[2] == y {
                    match w[1].as_str() {
                        "and" => and_count += 1,
                        "or" => or_count += 1,
                        _ => {}
                    }
                }
            }
            let ratio = match (and_count, or_count) {
                (0, 0) => Ratio::Undefined,
                (_, 0) => Ratio::Infinite,
                (a, o) => Ratio::Finite(a as f64 / o as f64),
            };
            ConnectiveCount {
                word_x: x,
                word_y: y,
                and_count,
                or_count,
                ratio,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TokenizerConfig {
        TokenizerConfig::default()
    }

    #[test]
    fn counts_and_ranks() {
        let s = ingest("a a b", &cfg()).unwrap();
        assert_eq!(s.entries(), &[("a".to_string(), 2), ("b".to_string(), 1)]);
        assert_eq!(s.total(), 3);
    }

    #[test]
    fn case_folding() {
        let s = ingest("The the THE cat", &cfg()).unwrap();
        assert_eq!(s.entries(), &[("the".to_string(), 3), ("cat".to_string(), 1)]);
    }

    #[test]
    fn empty_corpus() {
        assert!(matches!(ingest("", &cfg()), Err(Error::EmptyCorpus)));
        assert!(matches!(ingest("123 ... !!", &cfg()), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn ties_are_lexicographic() {
        let s = ingest("zeta alpha mid", &cfg()).unwrap();
        let words: Vec<_> = s.entries().iter().map(|(w, _)| w.as_str()).collect();
        assert_eq!(words, ["alpha", "mid", "zeta"]);
    }

    #[test]
    fn letter_runs() {
        let t = tokenize("don't stop/Éclair, naïve42x", &cfg());
        assert_eq!(t, ["don", "t", "stop", "éclair", "naïve", "x"]);
        let keep = TokenizerConfig {
            keep_inner_apostrophes: true,
            ..cfg()
        };
        assert_eq!(tokenize("don't 'quoted'", &keep), ["don't", "quoted"]);
    }

    #[test]
    fn connectives() {
        let corpus = "car and building. car or building. car and building.";
        let pairs = vec![("car".to_string(), "building".to_string())];
        let r = connective_ratio(corpus, &pairs, &cfg());
        assert_eq!((r[0].and_count, r[0].or_count), (2, 1));
        assert_eq!(r[0].ratio, Ratio::Finite(2.0));

        let absent = vec![("fruit".to_string(), "vegetable".to_string())];
        let r = connective_ratio(corpus, &absent, &cfg());
        assert_eq!((r[0].and_count, r[0].or_count, r[0].ratio), (0, 0, Ratio::Undefined));

        let r = connective_ratio("building and car", &pairs, &cfg());
        assert_eq!(r[0].and_count, 0);

        let r = connective_ratio("Car AND Building", &pairs, &cfg());
        assert_eq!((r[0].and_count, r[0].ratio), (1, Ratio::Infinite));
    }
}
