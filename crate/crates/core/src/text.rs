//! String primitives behind the cleaning operations.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{LabelCatalog, LabelId};

/// Levenshtein distance over Unicode scalar values with unit costs.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    // keep the row as short as possible
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    if short.is_empty() {
        return long.len();
    }

    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut cur = vec![0; short.len() + 1];
    for (j, &lc) in long.iter().enumerate() {
        cur[0] = j + 1;
        for (i, &sc) in short.iter().enumerate() {
            let substitute = prev[i] + usize::from(sc != lc);
            cur[i + 1] = substitute.min(prev[i + 1] + 1).min(cur[i] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// Similarity in `[0, 1]`; exactly 1 for equal strings.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub const IDENTICAL: SimilarityScore = SimilarityScore(1.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for SimilarityScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// `1 - d(a, b) / max(|a|, |b|)` in characters; 1 when both are empty.
pub fn similarity_ratio(a: &str, b: &str) -> SimilarityScore {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return SimilarityScore::IDENTICAL;
    }
    SimilarityScore(1.0 - edit_distance(a, b) as f64 / longest as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connective {
    And,
    Or,
}

impl Connective {
    pub fn word(self) -> &'static str {
        match self {
            Connective::And => "and",
            Connective::Or => "or",
        }
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

fn is_connective_word(word: &str, connective: Connective) -> bool {
    word.eq_ignore_ascii_case(connective.word())
}

/// True when the connective occurs as a standalone word.
pub fn has_connective(name: &str, connective: Connective) -> bool {
    name.split(|c: char| c.is_whitespace() || c == ',')
        .any(|w| is_connective_word(w, connective))
}

/// True when the connective letters occur only inside other words
/// ("sand", "ormolu").
pub fn has_embedded_connective(name: &str, connective: Connective) -> bool {
    !has_connective(name, connective) && name.to_lowercase().contains(connective.word())
}

/// Split a label name on a standalone connective word.
///
/// Commas act as separators only when the connective word is present
/// ("a, b and c"); otherwise the name comes back whole, as it does when
/// fewer than two non-empty tokens remain.
pub fn split_connective(name: &str, connective: Connective) -> Vec<String> {
    let whole = || vec![name.trim().to_string()];
    if !has_connective(name, connective) {
        return whole();
    }

    let mut tokens = Vec::new();
    for piece in name.split(',') {
        let mut current: Vec<&str> = Vec::new();
        for word in piece.split_whitespace() {
            if is_connective_word(word, connective) {
                push_token(&mut tokens, &mut current);
            } else {
                current.push(word);
            }
        }
        push_token(&mut tokens, &mut current);
    }

    if tokens.len() < 2 {
        whole()
    } else {
        tokens
    }
}

fn push_token(tokens: &mut Vec<String>, words: &mut Vec<&str>) {
    if !words.is_empty() {
        tokens.push(words.join(" "));
        words.clear();
    }
}

/// Lowercase word tokens split on whitespace and punctuation.
pub fn tokenize(name: &str) -> Vec<String> {
    name.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitClass {
    AllResolved,
    NoneResolved,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectiveSplit {
    pub source: LabelId,
    pub connective: Connective,
    pub tokens: Vec<String>,
    pub resolution: Vec<Option<LabelId>>,
    pub class: SplitClass,
}

impl ConnectiveSplit {
    /// Resolved token ids, in token order, without repeats.
    pub fn resolved_ids(&self) -> Vec<LabelId> {
        let mut out: Vec<LabelId> = Vec::new();
        for id in self.resolution.iter().flatten() {
            if !out.contains(id) {
                out.push(*id);
            }
        }
        out
    }
}

/// Look each token up by canonical name within `category`.
pub fn resolve_split(
    source: LabelId,
    connective: Connective,
    tokens: Vec<String>,
    category: &str,
    catalog: &LabelCatalog,
) -> ConnectiveSplit {
    let resolution: Vec<Option<LabelId>> = tokens
        .iter()
        .map(|t| catalog.lookup(category, t).filter(|&id| id != source))
        .collect();
    let hits = resolution.iter().filter(|r| r.is_some()).count();
    let class = if hits == resolution.len() {
        SplitClass::AllResolved
    } else if hits == 0 {
        SplitClass::NoneResolved
    } else {
        SplitClass::Partial
    };
    ConnectiveSplit {
        source,
        connective,
        tokens,
        resolution,
        class,
    }
}

/// Split and resolve a catalog label; `None` when the name has no connective.
pub fn split_label(catalog: &LabelCatalog, id: LabelId, connective: Connective) -> Option<ConnectiveSplit> {
    let record = catalog.get(id)?;
    let tokens = split_connective(&record.name, connective);
    (tokens.len() >= 2).then(|| resolve_split(id, connective, tokens, &record.category, catalog))
}
