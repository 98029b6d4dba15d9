//! Candidate generation for review, and application of verified plans.
//!
//! The `find_*` functions never modify data. Everything that changes a
//! catalog or an annotation set goes through a [`TransformPlan`] (or one of
//! its parts) that has been checked against the catalog first.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::catalog::{AnnotationSet, LabelCatalog, LabelId, LabelRecord, LabelSet};
use crate::error::{Error, Result};
use crate::text::{
    has_connective, has_embedded_connective, similarity_ratio, split_label, tokenize, Connective, ConnectiveSplit,
    SimilarityScore, SplitClass,
};

/// Duplicate-candidate threshold used when none is given.
pub const DEFAULT_SIMILARITY: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Merge {
    pub survivor: LabelId,
    pub absorbed: Vec<LabelId>,
}

/// Directed edge from a supercategory to one of its subcategories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HierarchyEdge {
    pub parent: LabelId,
    pub child: LabelId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AndSplit {
    pub source: LabelId,
    pub tokens: Vec<LabelId>,
    pub remove_source: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrGroup {
    pub source: LabelId,
    pub components: Vec<LabelId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformPlan {
    pub merges: Vec<Merge>,
    pub hierarchy_edges: Vec<HierarchyEdge>,
    pub and_splits: Vec<AndSplit>,
    pub or_groups: Vec<OrGroup>,
    pub exclusion_groups: Vec<LabelSet>,
}

fn plan_error(msg: String) -> Error {
    Error::InvalidPlan(msg)
}

impl TransformPlan {
    pub fn validate(&self, catalog: &LabelCatalog) -> Result<()> {
        validate_merges(catalog, &self.merges)?;
        validate_hierarchy(catalog, &self.hierarchy_edges)?;
        validate_and_splits(catalog, &self.and_splits)?;
        for g in &self.or_groups {
            catalog.require(g.source)?;
            if g.components.is_empty() {
                return Err(plan_error(format!("or-group {} has no components", g.source)));
            }
            for &c in &g.components {
                catalog.require(c)?;
                if c == g.source {
                    return Err(plan_error(format!("or-group {} lists itself", g.source)));
                }
            }
        }
        let mut grouped = BTreeSet::new();
        for g in &self.exclusion_groups {
            if g.is_empty() {
                return Err(plan_error("empty exclusion group".into()));
            }
            for id in g {
                catalog.require(id)?;
                if !grouped.insert(id) {
                    return Err(plan_error(format!("label {id} is in two exclusion groups")));
                }
            }
        }
        Ok(())
    }

    /// Apply merges, then and-splits, then supercategory propagation.
    ///
    /// Ids absorbed by a merge are rewritten to their survivor in the later
    /// steps.
    pub fn apply(
        &self,
        annotations: &AnnotationSet,
        catalog: &LabelCatalog,
        propagation: Propagation,
    ) -> Result<(AnnotationSet, LabelCatalog)> {
        self.validate(catalog)?;
        let (annotations, catalog) = apply_merges(annotations, catalog, &self.merges)?;
        let rename = merge_map(&self.merges);
        let remap = |id: LabelId| rename.get(&id).copied().unwrap_or(id);

        let splits: Vec<AndSplit> = self
            .and_splits
            .iter()
            .map(|s| AndSplit {
                source: remap(s.source),
                tokens: s.tokens.iter().map(|&t| remap(t)).collect(),
                remove_source: s.remove_source,
            })
            .collect();
        let (annotations, catalog) = apply_and_splits(&annotations, &catalog, &splits)?;

        let edges: Vec<HierarchyEdge> = self
            .hierarchy_edges
            .iter()
            .map(|e| HierarchyEdge {
                parent: remap(e.parent),
                child: remap(e.child),
            })
            .filter(|e| e.parent != e.child && catalog.contains(e.parent) && catalog.contains(e.child))
            .collect();
        let annotations = propagate_supercategories(&annotations, &edges, propagation)?;
        Ok((annotations, catalog))
    }
}

fn merge_map(merges: &[Merge]) -> BTreeMap<LabelId, LabelId> {
    merges
        .iter()
        .flat_map(|m| m.absorbed.iter().map(move |&a| (a, m.survivor)))
        .collect()
}

pub fn validate_merges(catalog: &LabelCatalog, merges: &[Merge]) -> Result<()> {
    let mut absorbed = BTreeSet::new();
    for m in merges {
        catalog.require(m.survivor)?;
        if m.absorbed.is_empty() {
            return Err(plan_error(format!("merge into {} absorbs nothing", m.survivor)));
        }
        for &a in &m.absorbed {
            catalog.require(a)?;
            if a == m.survivor {
                return Err(plan_error(format!("label {a} merged with itself")));
            }
            if !absorbed.insert(a) {
                return Err(plan_error(format!("label {a} absorbed by two merges")));
            }
        }
    }
    if let Some(m) = merges.iter().find(|m| absorbed.contains(&m.survivor)) {
        return Err(plan_error(format!(
            "survivor {} is itself absorbed by another merge",
            m.survivor
        )));
    }
    Ok(())
}

pub fn validate_hierarchy(catalog: &LabelCatalog, edges: &[HierarchyEdge]) -> Result<()> {
    for e in edges {
        catalog.require(e.parent)?;
        catalog.require(e.child)?;
    }
    check_acyclic(edges)
}

pub fn validate_and_splits(catalog: &LabelCatalog, splits: &[AndSplit]) -> Result<()> {
    for s in splits {
        catalog.require(s.source)?;
        for &t in &s.tokens {
            catalog.require(t)?;
            if t == s.source {
                return Err(plan_error(format!("and-split {} lists itself", s.source)));
            }
        }
        if s.remove_source {
            let complete =
                split_label(catalog, s.source, Connective::And).is_some_and(|sp| sp.class == SplitClass::AllResolved);
            if !complete {
                return Err(plan_error(format!(
                    "and-split {} removes its source but not every token resolves",
                    s.source
                )));
            }
        }
    }
    Ok(())
}

fn children_by_parent(edges: &[HierarchyEdge]) -> BTreeMap<LabelId, Vec<LabelId>> {
    let mut adj: BTreeMap<LabelId, Vec<LabelId>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.parent).or_default().push(e.child);
    }
    adj
}

fn check_acyclic(edges: &[HierarchyEdge]) -> Result<()> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let adj = children_by_parent(edges);
    let mut marks: BTreeMap<LabelId, Mark> = BTreeMap::new();
    for &start in adj.keys() {
        if marks.contains_key(&start) {
            continue;
        }
        // iterative DFS: (node, next child index)
        let mut stack = alloc::vec![(start, 0usize)];
        marks.insert(start, Mark::Open);
        while let Some(top) = stack.last_mut() {
            let node = top.0;
            let children = adj.get(&node).map(Vec::as_slice).unwrap_or(&[]);
            if let Some(&child) = children.get(top.1) {
                top.1 += 1;
                match marks.get(&child) {
                    Some(Mark::Open) => return Err(Error::HierarchyCycle(child)),
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(child, Mark::Open);
                        stack.push((child, 0));
                    }
                }
            } else {
                marks.insert(node, Mark::Done);
                stack.pop();
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuplicateCandidate {
    pub first: LabelId,
    pub second: LabelId,
    pub score: SimilarityScore,
    /// Equal after replacing hyphens with spaces.
    pub dehyphenated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyCandidate {
    pub parent: LabelId,
    pub child: LabelId,
    pub evidence: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub duplicate_pairs: Vec<DuplicateCandidate>,
    pub hierarchy_candidates: Vec<HierarchyCandidate>,
    pub split_candidates: Vec<ConnectiveSplit>,
}

fn dehyphenate(canonical: &str) -> String {
    let spaced: String = canonical.chars().map(|c| if c == '-' { ' ' } else { c }).collect();
    crate::catalog::canonicalize(&spaced)
}

/// Pairwise duplicate scan, split into independent rows so callers can
/// spread rows over threads and merge with [`DuplicateScanner::finish`].
#[derive(Debug)]
pub struct DuplicateScanner<'a> {
    records: &'a [LabelRecord],
    lengths: Vec<usize>,
    dehyphenated: Vec<String>,
    threshold: f64,
    same_category_only: bool,
}

impl<'a> DuplicateScanner<'a> {
    pub fn new(catalog: &'a LabelCatalog, threshold: f64, same_category_only: bool) -> Result<Self> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "similarity threshold must be in (0, 1], got {threshold}"
            )));
        }
        let records = catalog.records();
        Ok(DuplicateScanner {
            records,
            lengths: records.iter().map(|r| r.canonical.chars().count()).collect(),
            dehyphenated: records.iter().map(|r| dehyphenate(&r.canonical)).collect(),
            threshold,
            same_category_only,
        })
    }

    pub fn rows(&self) -> usize {
        self.records.len()
    }

    /// Candidates pairing record `i` with every later record.
    pub fn row(&self, i: usize) -> Vec<DuplicateCandidate> {
        let a = &self.records[i];
        let mut out = Vec::new();
        for j in i + 1..self.records.len() {
            let b = &self.records[j];
            if self.same_category_only && a.category != b.category {
                continue;
            }
            if self.dehyphenated[i] == self.dehyphenated[j] {
                out.push(DuplicateCandidate {
                    first: a.id,
                    second: b.id,
                    score: SimilarityScore::IDENTICAL,
                    dehyphenated: a.canonical != b.canonical,
                });
                continue;
            }
            // d >= |la - lb| bounds the ratio from above
            let (la, lb) = (self.lengths[i], self.lengths[j]);
            let longest = la.max(lb);
            if longest > 0 && 1.0 - (la.abs_diff(lb) as f64) / (longest as f64) < self.threshold {
                continue;
            }
            let score = similarity_ratio(&a.canonical, &b.canonical);
            if score.value() >= self.threshold {
                out.push(DuplicateCandidate {
                    first: a.id,
                    second: b.id,
                    score,
                    dehyphenated: false,
                });
            }
        }
        out
    }

    /// Descending score, then ascending ids.
    pub fn finish(mut pairs: Vec<DuplicateCandidate>) -> Vec<DuplicateCandidate> {
        pairs.sort_by(|x, y| {
            y.score
                .value()
                .total_cmp(&x.score.value())
                .then(x.first.cmp(&y.first))
                .then(x.second.cmp(&y.second))
        });
        pairs
    }
}

/// All unordered pairs whose canonical names reach `threshold` similarity.
/// Names equal up to hyphen/space variation score 1.
pub fn find_duplicates(
    catalog: &LabelCatalog,
    threshold: f64,
    same_category_only: bool,
) -> Result<Vec<DuplicateCandidate>> {
    let scanner = DuplicateScanner::new(catalog, threshold, same_category_only)?;
    let pairs = (0..scanner.rows()).flat_map(|i| scanner.row(i)).collect();
    Ok(DuplicateScanner::finish(pairs))
}

/// Emit (A, B) when both share a category and A's tokens form a strict
/// contiguous run inside B's tokens.
pub fn find_hierarchy_candidates(catalog: &LabelCatalog) -> Vec<HierarchyCandidate> {
    let tokens: Vec<Vec<String>> = catalog.iter().map(|r| tokenize(&r.name)).collect();
    let mut index: BTreeMap<(&str, &[String]), Vec<LabelId>> = BTreeMap::new();
    for (r, t) in catalog.iter().zip(&tokens) {
        if !t.is_empty() {
            index.entry((r.category.as_str(), t.as_slice())).or_default().push(r.id);
        }
    }

    let mut found: BTreeMap<(LabelId, LabelId), String> = BTreeMap::new();
    for (r, t) in catalog.iter().zip(&tokens) {
        for len in 1..t.len() {
            for start in 0..=t.len() - len {
                let window = &t[start..start + len];
                let Some(parents) = index.get(&(r.category.as_str(), window)) else {
                    continue;
                };
                for &p in parents {
                    found.entry((p, r.id)).or_insert_with(|| {
                        format!(
                            "tokens {}..{} of \"{}\" = \"{}\"",
                            start,
                            start + len,
                            r.name,
                            window.join(" ")
                        )
                    });
                }
            }
        }
    }
    found
        .into_iter()
        .map(|((parent, child), evidence)| HierarchyCandidate {
            parent,
            child,
            evidence,
        })
        .collect()
}

/// Rewrite absorbed ids to their survivor and drop them from the catalog.
pub fn apply_merges(
    annotations: &AnnotationSet,
    catalog: &LabelCatalog,
    merges: &[Merge],
) -> Result<(AnnotationSet, LabelCatalog)> {
    validate_merges(catalog, merges)?;
    let rename = merge_map(merges);
    let rewritten =
        annotations.map_labels(|_, labels| labels.iter().map(|l| rename.get(&l).copied().unwrap_or(l)).collect());
    let removed: BTreeSet<LabelId> = rename.into_keys().collect();
    Ok((rewritten, catalog.without(&removed)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Propagation {
    /// Add every ancestor.
    #[default]
    Transitive,
    /// Add direct parents only.
    Direct,
}

/// Add supercategories for every subcategory a sample carries. Never
/// removes labels.
pub fn propagate_supercategories(
    annotations: &AnnotationSet,
    edges: &[HierarchyEdge],
    mode: Propagation,
) -> Result<AnnotationSet> {
    check_acyclic(edges)?;
    let mut parents: BTreeMap<LabelId, LabelSet> = BTreeMap::new();
    for e in edges {
        parents.entry(e.child).or_default().insert(e.parent);
    }
    let lift: BTreeMap<LabelId, LabelSet> = match mode {
        Propagation::Direct => parents,
        Propagation::Transitive => {
            let mut closure = BTreeMap::new();
            for &child in parents.keys() {
                ancestors(child, &parents, &mut closure);
            }
            closure
        }
    };

    Ok(annotations.map_labels(|_, labels| {
        let mut out = labels.clone();
        for l in labels {
            if let Some(up) = lift.get(&l) {
                out.extend(up.iter());
            }
        }
        out
    }))
}

// Memoized ancestor set; acyclicity is checked by the caller.
fn ancestors(node: LabelId, parents: &BTreeMap<LabelId, LabelSet>, memo: &mut BTreeMap<LabelId, LabelSet>) -> LabelSet {
    if let Some(done) = memo.get(&node) {
        return done.clone();
    }
    let mut acc = LabelSet::new();
    if let Some(ps) = parents.get(&node) {
        for p in ps {
            acc.insert(p);
            let up = ancestors(p, parents, memo);
            acc.extend(up.iter());
        }
    }
    memo.insert(node, acc.clone());
    acc
}

/// Add resolved tokens wherever a split source occurs; drop sources marked
/// `remove_source` from the catalog and from every sample.
pub fn apply_and_splits(
    annotations: &AnnotationSet,
    catalog: &LabelCatalog,
    splits: &[AndSplit],
) -> Result<(AnnotationSet, LabelCatalog)> {
    validate_and_splits(catalog, splits)?;
    let mut additions: BTreeMap<LabelId, LabelSet> = BTreeMap::new();
    for s in splits {
        additions.entry(s.source).or_default().extend(s.tokens.iter().copied());
    }
    let removed: BTreeSet<LabelId> = splits.iter().filter(|s| s.remove_source).map(|s| s.source).collect();

    let rewritten = annotations.map_labels(|_, labels| {
        let mut out = labels.clone();
        for l in labels {
            if let Some(add) = additions.get(&l) {
                out.extend(add.iter());
            }
        }
        out.retain(|l| !removed.contains(&l));
        out
    });
    Ok((rewritten, catalog.without(&removed)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectiveTally {
    pub connective: Connective,
    pub total: usize,
    pub all_resolved: usize,
    pub none_resolved: usize,
    pub partial: usize,
    /// One entry per label containing the standalone connective, ascending id.
    pub splits: Vec<ConnectiveSplit>,
    /// Labels where the connective letters only occur inside a word; these
    /// are not counted above.
    pub embedded_only: Vec<LabelId>,
}

pub fn classify_connectives(catalog: &LabelCatalog, connective: Connective) -> ConnectiveTally {
    let mut tally = ConnectiveTally {
        connective,
        total: 0,
        all_resolved: 0,
        none_resolved: 0,
        partial: 0,
        splits: Vec::new(),
        embedded_only: Vec::new(),
    };
    for r in catalog.iter() {
        if has_embedded_connective(&r.name, connective) {
            tally.embedded_only.push(r.id);
        }
        if !has_connective(&r.name, connective) {
            continue;
        }
        let Some(split) = split_label(catalog, r.id, connective) else {
            // connective word present but fewer than two tokens, e.g. "and"
            continue;
        };
        tally.total += 1;
        match split.class {
            SplitClass::AllResolved => tally.all_resolved += 1,
            SplitClass::NoneResolved => tally.none_resolved += 1,
            SplitClass::Partial => tally.partial += 1,
        }
        tally.splits.push(split);
    }
    tally
}

/// And-splits for every label with at least one resolved token; sources are
/// removed only when all tokens resolve.
pub fn and_splits_from(tally: &ConnectiveTally) -> Vec<AndSplit> {
    tally
        .splits
        .iter()
        .filter(|s| s.class != SplitClass::NoneResolved)
        .map(|s| AndSplit {
            source: s.source,
            tokens: s.resolved_ids(),
            remove_source: s.class == SplitClass::AllResolved,
        })
        .collect()
}

/// Or-groups for every label with at least one resolved token.
pub fn or_groups_from(tally: &ConnectiveTally) -> Vec<OrGroup> {
    tally
        .splits
        .iter()
        .filter(|s| s.class != SplitClass::NoneResolved)
        .map(|s| OrGroup {
            source: s.source,
            components: s.resolved_ids(),
        })
        .collect()
}
