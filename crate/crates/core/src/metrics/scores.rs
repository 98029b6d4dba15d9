use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;

use crate::catalog::{AnnotationSet, LabelId, LabelSet};
use crate::error::{Error, Result};

/// Raw per-(sample, label) scores in `[0, 1]`. Absent entries score 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreSet {
    entries: BTreeMap<String, BTreeMap<LabelId, f64>>,
}

impl ScoreSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Store one score. Repeating a (sample, label) pair is an error.
    pub fn insert(&mut self, sample_id: &str, label: LabelId, score: f64) -> Result<()> {
        if !(score.is_finite() && (0.0..=1.0).contains(&score)) {
            return Err(Error::InvalidArgument(format!(
                "score {score} for sample {sample_id:?}, label {label} is outside [0, 1]"
            )));
        }
        let row = self.entries.entry(String::from(sample_id)).or_default();
        if row.insert(label, score).is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate score for sample {sample_id:?}, label {label}"
            )));
        }
        Ok(())
    }

    /// Register a sample that may have no stored entries.
    pub fn ensure_sample(&mut self, sample_id: &str) {
        self.entries.entry(String::from(sample_id)).or_default();
    }

    pub fn contains_sample(&self, sample_id: &str) -> bool {
        self.entries.contains_key(sample_id)
    }

    pub fn sample(&self, sample_id: &str) -> Option<&BTreeMap<LabelId, f64>> {
        self.entries.get(sample_id)
    }

    pub fn score(&self, sample_id: &str, label: LabelId) -> f64 {
        self.entries
            .get(sample_id)
            .and_then(|row| row.get(&label))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn sample_count(&self) -> usize {
        self.entries.len()
    }

    pub fn entry_count(&self) -> usize {
        self.entries.values().map(BTreeMap::len).sum()
    }

    pub fn sample_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.keys().map(String::as_str)
    }

    /// (sample, label, score) in ascending sample then label order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, LabelId, f64)> + '_ {
        self.entries
            .iter()
            .flat_map(|(s, row)| row.iter().map(move |(&l, &v)| (s.as_str(), l, v)))
    }
}

/// Predict a label iff its score is at least `t`.
pub fn threshold(scores: &ScoreSet, t: f64) -> Result<AnnotationSet> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("threshold {t} is outside [0, 1]")));
    }
    Ok(scores
        .entries
        .iter()
        .map(|(s, row)| {
            let labels: LabelSet = row.iter().filter(|&(_, &v)| v >= t).map(|(&l, _)| l).collect();
            (s.clone(), labels)
        })
        .collect())
}
