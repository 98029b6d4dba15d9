//! Label vocabulary, annotation sets and corpus statistics.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Category assigned to labels whose attribute name carries no separator.
pub const UNCATEGORIZED: &str = "uncategorized";

/// File-assigned attribute id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelId(pub u32);

impl fmt::Display for LabelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for LabelId {
    fn from(v: u32) -> Self {
        LabelId(v)
    }
}

/// Lowercase, NFC-normalize, collapse whitespace runs and trim.
///
/// Hyphens are kept: "bronze gilt" and "bronze-gilt" stay distinct here.
pub fn canonicalize(s: &str) -> String {
    let folded: String = s.to_lowercase().nfc().collect();
    let mut out = String::with_capacity(folded.len());
    for word in folded.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub id: LabelId,
    pub category: String,
    pub name: String,
    pub canonical: String,
    /// False when the source attribute name had no category separator.
    #[serde(default = "default_true")]
    pub has_category: bool,
}

fn default_true() -> bool {
    true
}

impl LabelRecord {
    pub fn new(id: LabelId, category: impl Into<String>, name: impl Into<String>) -> Self {
        let name = name.into();
        LabelRecord {
            id,
            category: category.into(),
            canonical: canonicalize(&name),
            name,
            has_category: true,
        }
    }

    /// Split `attribute_name` at the first `separator`. Without a separator
    /// the record lands in [`UNCATEGORIZED`].
    pub fn from_attribute_name(id: LabelId, attribute_name: &str, separator: &str) -> Self {
        match attribute_name.split_once(separator) {
            Some((category, name)) if !separator.is_empty() => LabelRecord::new(id, category, name),
            _ => LabelRecord {
                has_category: false,
                ..LabelRecord::new(id, UNCATEGORIZED, attribute_name)
            },
        }
    }

    pub fn attribute_name(&self, separator: &str) -> String {
        if self.has_category {
            format!("{}{}{}", self.category, separator, self.name)
        } else {
            self.name.clone()
        }
    }
}

/// Ordered label vocabulary with id and canonical-name lookup.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelCatalog {
    records: Vec<LabelRecord>,
    by_canonical: BTreeMap<(String, String), Vec<LabelId>>,
}

impl LabelCatalog {
    pub fn from_records(mut records: Vec<LabelRecord>) -> Result<Self> {
        records.sort_by_key(|r| r.id);
        if let Some(w) = records.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::DuplicateLabelId(w[0].id));
        }
        let mut by_canonical: BTreeMap<(String, String), Vec<LabelId>> = BTreeMap::new();
        for r in &records {
            by_canonical
                .entry((r.category.clone(), r.canonical.clone()))
                .or_default()
                .push(r.id);
        }
        Ok(LabelCatalog { records, by_canonical })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in ascending id order.
    pub fn iter(&self) -> core::slice::Iter<'_, LabelRecord> {
        self.records.iter()
    }

    pub fn records(&self) -> &[LabelRecord] {
        &self.records
    }

    pub fn ids(&self) -> impl Iterator<Item = LabelId> + '_ {
        self.records.iter().map(|r| r.id)
    }

    pub fn get(&self, id: LabelId) -> Option<&LabelRecord> {
        self.records
            .binary_search_by_key(&id, |r| r.id)
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn contains(&self, id: LabelId) -> bool {
        self.get(id).is_some()
    }

    pub fn require(&self, id: LabelId) -> Result<&LabelRecord> {
        self.get(id).ok_or(Error::UnknownLabel(id))
    }

    /// Lowest id whose (category, canonical name) matches.
    pub fn lookup(&self, category: &str, name: &str) -> Option<LabelId> {
        self.lookup_all(category, name).first().copied()
    }

    pub fn lookup_all(&self, category: &str, name: &str) -> &[LabelId] {
        self.by_canonical
            .get(&(String::from(category), canonicalize(name)))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Groups of ids that share a (category, canonical) key.
    pub fn canonical_duplicates(&self) -> Vec<Vec<LabelId>> {
        self.by_canonical
            .values()
            .filter(|ids| ids.len() > 1)
            .cloned()
            .collect()
    }

    pub fn category_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.records {
            *counts.entry(r.category.clone()).or_insert(0) += 1;
        }
        counts
    }

    pub fn ids_in_category(&self, category: &str) -> LabelSet {
        self.records
            .iter()
            .filter(|r| r.category == category)
            .map(|r| r.id)
            .collect()
    }

    pub fn all_ids(&self) -> LabelSet {
        self.ids().collect()
    }

    /// Copy of the catalog with `removed` dropped.
    pub fn without(&self, removed: &BTreeSet<LabelId>) -> LabelCatalog {
        let records = self
            .records
            .iter()
            .filter(|r| !removed.contains(&r.id))
            .cloned()
            .collect();
        // ids stay unique, so this cannot fail
        LabelCatalog::from_records(records).expect("subset of a valid catalog")
    }
}

/// Sorted, duplicate-free set of label ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelSet(Vec<LabelId>);

impl LabelSet {
    pub fn new() -> Self {
        LabelSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: LabelId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    /// Returns false when `id` was already present.
    pub fn insert(&mut self, id: LabelId) -> bool {
        match self.0.binary_search(&id) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, id);
                true
            }
        }
    }

    pub fn remove(&mut self, id: LabelId) -> bool {
        match self.0.binary_search(&id) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = LabelId> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[LabelId] {
        &self.0
    }

    pub fn intersects(&self, other: &LabelSet) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().any(|id| large.contains(id))
    }

    pub fn intersection(&self, other: &LabelSet) -> LabelSet {
        LabelSet(self.iter().filter(|&id| other.contains(id)).collect())
    }

    pub fn union(&self, other: &LabelSet) -> LabelSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(LabelId) -> bool) {
        self.0.retain(|&id| keep(id));
    }
}

impl FromIterator<LabelId> for LabelSet {
    fn from_iter<I: IntoIterator<Item = LabelId>>(iter: I) -> Self {
        let mut v: Vec<LabelId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        LabelSet(v)
    }
}

impl Extend<LabelId> for LabelSet {
    fn extend<I: IntoIterator<Item = LabelId>>(&mut self, iter: I) {
        self.0.extend(iter);
        self.0.sort_unstable();
        self.0.dedup();
    }
}

impl<'a> IntoIterator for &'a LabelSet {
    type Item = LabelId;
    type IntoIter = core::iter::Copied<core::slice::Iter<'a, LabelId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// Sample id to label set, iterated in ascending sample id order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationSet {
    samples: BTreeMap<String, LabelSet>,
}

impl AnnotationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, sample_id: impl Into<String>, labels: LabelSet) -> Result<()> {
        let sample_id = sample_id.into();
        if self.samples.contains_key(&sample_id) {
            return Err(Error::DuplicateSample(sample_id));
        }
        self.samples.insert(sample_id, labels);
        Ok(())
    }

    /// Every label must exist in `catalog`.
    pub fn validate(&self, catalog: &LabelCatalog) -> Result<()> {
        for (sample, labels) in &self.samples {
            if let Some(label) = labels.iter().find(|&l| !catalog.contains(l)) {
                return Err(Error::UnknownLabelInSample {
                    sample: sample.clone(),
                    label,
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn get(&self, sample_id: &str) -> Option<&LabelSet> {
        self.samples.get(sample_id)
    }

    pub fn contains_sample(&self, sample_id: &str) -> bool {
        self.samples.contains_key(sample_id)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&str, &LabelSet)> + '_ {
        self.samples.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn sample_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.samples.keys().map(String::as_str)
    }

    pub fn total_positives(&self) -> usize {
        self.samples.values().map(LabelSet::len).sum()
    }

    /// Rebuild every label set through `f`.
    pub fn map_labels(&self, mut f: impl FnMut(&str, &LabelSet) -> LabelSet) -> AnnotationSet {
        AnnotationSet {
            samples: self.samples.iter().map(|(k, v)| (k.clone(), f(k, v))).collect(),
        }
    }

    /// Positive-sample count per label. Labels never seen are absent.
    pub fn label_frequency(&self) -> BTreeMap<LabelId, u64> {
        let mut freq = BTreeMap::new();
        for labels in self.samples.values() {
            for l in labels {
                *freq.entry(l).or_insert(0) += 1;
            }
        }
        freq
    }

    pub fn frequency_of(&self, label: LabelId) -> u64 {
        self.samples.values().filter(|s| s.contains(label)).count() as u64
    }
}

impl FromIterator<(String, LabelSet)> for AnnotationSet {
    /// Later duplicates overwrite earlier ones; use [`AnnotationSet::insert`]
    /// when duplicates must be rejected.
    fn from_iter<I: IntoIterator<Item = (String, LabelSet)>>(iter: I) -> Self {
        AnnotationSet {
            samples: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub samples: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub label_count: usize,
    pub sample_count: usize,
    pub total_positives: u64,
    pub per_category_counts: BTreeMap<String, usize>,
    /// Every catalog label, including those with zero positives.
    pub per_label_frequency: BTreeMap<LabelId, u64>,
    /// (labels per sample, number of samples), ascending.
    pub labels_per_sample_histogram: Vec<(usize, u64)>,
    /// Lower median; `None` for an empty annotation set.
    pub median_labels_per_sample: Option<usize>,
    /// Samples holding at least one label of each category.
    pub category_coverage: BTreeMap<String, Coverage>,
}

pub fn compute_stats(annotations: &AnnotationSet, catalog: &LabelCatalog) -> CorpusStats {
    let mut per_label_frequency: BTreeMap<LabelId, u64> = catalog.ids().map(|id| (id, 0)).collect();
    let mut histogram: BTreeMap<usize, u64> = BTreeMap::new();
    let mut covered: BTreeMap<String, u64> = catalog.category_counts().into_keys().map(|c| (c, 0)).collect();

    for (_, labels) in annotations.iter() {
        *histogram.entry(labels.len()).or_insert(0) += 1;
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for l in labels {
            *per_label_frequency.entry(l).or_insert(0) += 1;
            if let Some(r) = catalog.get(l) {
                seen.insert(r.category.as_str());
            }
        }
        for cat in seen {
            if let Some(c) = covered.get_mut(cat) {
                *c += 1;
            }
        }
    }

    let n = annotations.len() as u64;
    let histogram: Vec<(usize, u64)> = histogram.into_iter().collect();
    let category_coverage = covered
        .into_iter()
        .map(|(cat, samples)| {
            (
                cat,
                Coverage {
                    samples,
                    fraction: ratio(samples, n),
                },
            )
        })
        .collect();

    CorpusStats {
        label_count: catalog.len(),
        sample_count: annotations.len(),
        total_positives: annotations.total_positives() as u64,
        per_category_counts: catalog.category_counts(),
        per_label_frequency,
        median_labels_per_sample: lower_median(&histogram),
        labels_per_sample_histogram: histogram,
        category_coverage,
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Lower median from an ascending (value, count) histogram.
pub fn lower_median(histogram: &[(usize, u64)]) -> Option<usize> {
    let total: u64 = histogram.iter().map(|&(_, c)| c).sum();
    if total == 0 {
        return None;
    }
    // zero-based rank of the lower median
    let rank = (total - 1) / 2;
    let mut seen = 0;
    for &(value, count) in histogram {
        seen += count;
        if seen > rank {
            return Some(value);
        }
    }
    unreachable!("rank is below the histogram total")
}

/// Fraction of samples with at least one label from `subset`.
pub fn coverage(annotations: &AnnotationSet, subset: &LabelSet) -> Coverage {
    let samples = annotations
        .iter()
        .filter(|(_, labels)| labels.intersects(subset))
        .count() as u64;
    Coverage {
        samples,
        fraction: ratio(samples, annotations.len() as u64),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cooccurrence {
    pub count_a: u64,
    pub count_b: u64,
    pub count_both: u64,
}

pub fn cooccurrence(
    annotations: &AnnotationSet,
    catalog: &LabelCatalog,
    a: LabelId,
    b: LabelId,
) -> Result<Cooccurrence> {
    catalog.require(a)?;
    catalog.require(b)?;
    if a == b {
        return Err(Error::InvalidArgument(format!(
            "co-occurrence needs two distinct labels, got {a} twice"
        )));
    }
    let mut out = Cooccurrence {
        count_a: 0,
        count_b: 0,
        count_both: 0,
    };
    for (_, labels) in annotations.iter() {
        let (ha, hb) = (labels.contains(a), labels.contains(b));
        out.count_a += ha as u64;
        out.count_b += hb as u64;
        out.count_both += (ha && hb) as u64;
    }
    Ok(out)
}
