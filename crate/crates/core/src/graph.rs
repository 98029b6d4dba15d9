//! Undirected label-relation graph with hop-distance queries.
//!
//! Edges come from resolved connective tokens (a label such as "sudan and
//! egypt" links to "sudan" and to "egypt") plus user-curated pairs. Labels
//! that touch no edge stay in the graph as isolated nodes.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{LabelCatalog, LabelId};
use crate::cleanse::{AndSplit, OrGroup};
use crate::error::{Error, Result};

/// Graphs up to this many nodes get an all-pairs distance table at build.
pub const ALL_PAIRS_LIMIT: usize = 4096;

const UNREACHABLE: u16 = u16::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Hops(u32),
    Infinite,
}

impl Distance {
    /// `1 / (d + 1)`, with `1 / (inf + 1) = 0`.
    pub fn credit(self) -> f64 {
        match self {
            Distance::Hops(d) => 1.0 / (f64::from(d) + 1.0),
            Distance::Infinite => 0.0,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Hops(_))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Hops(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationGraph {
    nodes: Vec<LabelId>,
    adjacency: Vec<Vec<u32>>,
    table: Option<Vec<u16>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub isolated: usize,
    /// Sizes of connected components, largest first.
    pub component_sizes: Vec<usize>,
}

impl RelationGraph {
    /// Build from explicit nodes and edges; edges are deduplicated.
    pub fn from_edges(
        nodes: impl IntoIterator<Item = LabelId>,
        edges: impl IntoIterator<Item = (LabelId, LabelId)>,
    ) -> Result<Self> {
        let nodes: Vec<LabelId> = nodes.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); nodes.len()];
        let index = |id: LabelId| {
            nodes
                .binary_search(&id)
                .map(|i| i as u32)
                .map_err(|_| Error::UnknownLabel(id))
        };
        for (a, b) in edges {
            if a == b {
                return Err(Error::SelfEdge(a));
            }
            let (ia, ib) = (index(a)?, index(b)?);
            adj[ia as usize].insert(ib);
            adj[ib as usize].insert(ia);
        }
        let adjacency: Vec<Vec<u32>> = adj.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut graph = RelationGraph {
            nodes,
            adjacency,
            table: None,
        };
        if graph.nodes.len() <= ALL_PAIRS_LIMIT {
            graph.table = Some(graph.all_pairs());
        }
        Ok(graph)
    }

    fn all_pairs(&self) -> Vec<u16> {
        let n = self.nodes.len();
        let mut table = vec![UNREACHABLE; n * n];
        for s in 0..n {
            let dist = self.bfs(s);
            for (t, d) in dist.into_iter().enumerate() {
                if let Some(d) = d {
                    table[s * n + t] = d as u16;
                }
            }
        }
        table
    }

    fn bfs(&self, source: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.nodes.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued nodes have a distance");
            for &v in &self.adjacency[u] {
                let v = v as usize;
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    fn index_of(&self, id: LabelId) -> Option<usize> {
        self.nodes.binary_search(&id).ok()
    }

    pub fn nodes(&self) -> &[LabelId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn contains(&self, id: LabelId) -> bool {
        self.index_of(id).is_some()
    }

    /// Sorted neighbors; empty for isolated or unknown labels.
    pub fn neighbors(&self, id: LabelId) -> Vec<LabelId> {
        self.index_of(id)
            .map(|i| self.adjacency[i].iter().map(|&j| self.nodes[j as usize]).collect())
            .unwrap_or_default()
    }

    /// Each undirected edge once, as (smaller id, larger id), sorted.
    pub fn edges(&self) -> Vec<(LabelId, LabelId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, ns) in self.adjacency.iter().enumerate() {
            for &j in ns {
                if (i as u32) < j {
                    out.push((self.nodes[i], self.nodes[j as usize]));
                }
            }
        }
        out
    }

    /// Hop count via breadth-first search. Labels outside the graph behave
    /// as isolated nodes.
    pub fn distance(&self, a: LabelId, b: LabelId) -> Distance {
        if a == b {
            return Distance::Hops(0);
        }
        let (Some(ia), Some(ib)) = (self.index_of(a), self.index_of(b)) else {
            return Distance::Infinite;
        };
        match &self.table {
            Some(table) => match table[ia * self.nodes.len() + ib] {
                UNREACHABLE => Distance::Infinite,
                d => Distance::Hops(u32::from(d)),
            },
            None => self.bfs(ia)[ib].map_or(Distance::Infinite, Distance::Hops),
        }
    }

    pub fn summary(&self) -> GraphSummary {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        let mut sizes = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut size = 0;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                size += 1;
                for &v in &self.adjacency[u] {
                    if !seen[v as usize] {
                        seen[v as usize] = true;
                        stack.push(v as usize);
                    }
                }
            }
            sizes.push(size);
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        GraphSummary {
            nodes: n,
            edges: self.edge_count(),
            isolated: self.adjacency.iter().filter(|a| a.is_empty()).count(),
            component_sizes: sizes,
        }
    }
}

/// Nodes are all catalog labels in `scope` (every label when `None`).
/// Connective edges with an endpoint outside the scope are dropped; curated
/// edges must name catalog labels and may not be self-edges.
pub fn build_graph(
    catalog: &LabelCatalog,
    or_groups: &[OrGroup],
    and_splits: &[AndSplit],
    curated_edges: &[(LabelId, LabelId)],
    scope: Option<&[String]>,
) -> Result<RelationGraph> {
    let in_scope = |id: LabelId| match (scope, catalog.get(id)) {
        (_, None) => false,
        (None, Some(_)) => true,
        (Some(cats), Some(r)) => cats.contains(&r.category),
    };
    for &(a, b) in curated_edges {
        catalog.require(a)?;
        catalog.require(b)?;
        if a == b {
            return Err(Error::SelfEdge(a));
        }
    }
    for g in or_groups {
        catalog.require(g.source)?;
        for &c in &g.components {
            catalog.require(c)?;
        }
    }
    for s in and_splits {
        catalog.require(s.source)?;
        for &t in &s.tokens {
            catalog.require(t)?;
        }
    }

    let connective = or_groups
        .iter()
        .flat_map(|g| g.components.iter().map(move |&c| (g.source, c)))
        .chain(
            and_splits
                .iter()
                .flat_map(|s| s.tokens.iter().map(move |&t| (s.source, t))),
        );
    let edges: Vec<(LabelId, LabelId)> = connective
        .chain(curated_edges.iter().copied())
        .filter(|&(a, b)| a != b && in_scope(a) && in_scope(b))
        .collect();
    let nodes = catalog.ids().filter(|&id| in_scope(id));
    RelationGraph::from_edges(nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::LabelRecord;
    use crate::cleanse::classify_connectives;
    use crate::cleanse::{and_splits_from, or_groups_from};
    use crate::text::Connective;
    use alloc::string::ToString;
    use proptest::prelude::*;

    const NAMES: &[&str] = &[
        "china",
        "french",
        "france",
        "present-day france",
        "united kingdom",
        "england",
        "scotland",
        "sudan",
        "egypt",
        "sudan and egypt",
        "egypt or iraq",
        "iraq",
    ];

    fn fig5() -> (LabelCatalog, RelationGraph) {
        let mut records: Vec<LabelRecord> = NAMES
            .iter()
            .enumerate()
            .map(|(i, n)| LabelRecord::new(LabelId(i as u32), "country", *n))
            .collect();
        records.push(LabelRecord::new(LabelId(100), "culture", "egyptian"));
        let cat = LabelCatalog::from_records(records).unwrap();
        let id = |n: &str| cat.lookup("country", n).unwrap();
        let curated = [
            (id("french"), id("france")),
            (id("france"), id("present-day france")),
            (id("united kingdom"), id("england")),
            (id("united kingdom"), id("scotland")),
            (id("egypt"), LabelId(100)),
        ];
        let and_tally = classify_connectives(&cat, Connective::And);
        let or_tally = classify_connectives(&cat, Connective::Or);
        let g = build_graph(
            &cat,
            &or_groups_from(&or_tally),
            &and_splits_from(&and_tally),
            &curated,
            Some(&["country".to_string()]),
        )
        .unwrap();
        (cat, g)
    }

    #[test]
    fn fig5_distances() {
        let (cat, g) = fig5();
        let id = |n: &str| cat.lookup("country", n).unwrap();
        assert!(g.neighbors(id("china")).is_empty());
        assert_eq!(g.distance(id("french"), id("present-day france")), Distance::Hops(2));
        assert_eq!(g.distance(id("china"), id("china")), Distance::Hops(0));
        assert_eq!(g.distance(id("china"), id("france")), Distance::Infinite);
        assert_eq!(g.distance(id("sudan"), id("egypt")), Distance::Hops(2));
        assert_eq!(g.distance(id("sudan"), id("iraq")), Distance::Hops(4));
        // out-of-scope culture label is not a node, so its edge is dropped
        assert!(!g.contains(LabelId(100)));
        assert_eq!(g.distance(LabelId(100), LabelId(100)), Distance::Hops(0));
        assert_eq!(g.distance(LabelId(100), id("egypt")), Distance::Infinite);
    }

    #[test]
    fn credit_values() {
        assert_eq!(Distance::Hops(0).credit(), 1.0);
        assert_eq!(Distance::Hops(2).credit(), 1.0 / 3.0);
        assert_eq!(Distance::Infinite.credit(), 0.0);
    }

    #[test]
    fn empty_inputs_give_edgeless_graph() {
        let cat = LabelCatalog::from_records(vec![
            LabelRecord::new(LabelId(0), "a", "x"),
            LabelRecord::new(LabelId(1), "a", "y"),
        ])
        .unwrap();
        let g = build_graph(&cat, &[], &[], &[], None).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.summary().component_sizes, [1, 1]);
    }

    #[test]
    fn curated_edge_errors() {
        let cat = LabelCatalog::from_records(vec![LabelRecord::new(LabelId(0), "a", "x")]).unwrap();
        assert_eq!(
            build_graph(&cat, &[], &[], &[(LabelId(0), LabelId(0))], None).unwrap_err(),
            Error::SelfEdge(LabelId(0))
        );
        assert_eq!(
            build_graph(&cat, &[], &[], &[(LabelId(0), LabelId(5))], None).unwrap_err(),
            Error::UnknownLabel(LabelId(5))
        );
    }

    #[test]
    fn summary_counts_components() {
        let (_, g) = fig5();
        let s = g.summary();
        assert_eq!(s.nodes, NAMES.len());
        assert_eq!(s.component_sizes.iter().sum::<usize>(), s.nodes);
        assert_eq!(s.component_sizes[0], 5); // sudan, egypt, iraq and the two connective labels
        assert_eq!(s.isolated, 1);
    }

    #[test]
    fn build_is_deterministic() {
        let (_, a) = fig5();
        let (_, b) = fig5();
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn large_graphs_fall_back_to_bfs() {
        let n = ALL_PAIRS_LIMIT as u32 + 2;
        let g = RelationGraph::from_edges((0..n).map(LabelId), (1..n).map(|i| (LabelId(i - 1), LabelId(i)))).unwrap();
        assert!(g.table.is_none());
        assert_eq!(g.distance(LabelId(0), LabelId(n - 1)), Distance::Hops(n - 1));
    }

    /// Floyd-Warshall over an adjacency matrix.
    fn floyd(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<Option<u32>>> {
        let mut d = vec![vec![None; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = Some(0);
        }
        for &(a, b) in edges {
            if a != b {
                d[a as usize][b as usize] = Some(1);
                d[b as usize][a as usize] = Some(1);
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                        if d[i][j].is_none_or(|cur| x + y < cur) {
                            d[i][j] = Some(x + y);
                        }
                    }
                }
            }
        }
        d
    }

    fn graph_of(n: usize, edges: &[(u32, u32)]) -> RelationGraph {
        RelationGraph::from_edges(
            (0..n as u32).map(LabelId),
            edges
                .iter()
                .filter(|(a, b)| a != b)
                .map(|&(a, b)| (LabelId(a), LabelId(b))),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn distances_match_all_pairs_oracle(n in 1usize..50, raw in prop::collection::vec((0u32..50, 0u32..50), 0..80)) {
            let edges: Vec<(u32, u32)> = raw.into_iter().filter(|&(a, b)| (a as usize) < n && (b as usize) < n).collect();
            let g = graph_of(n, &edges);
            let oracle = floyd(n, &edges);
            for i in 0..n {
                for j in 0..n {
                    let got = g.distance(LabelId(i as u32), LabelId(j as u32));
                    let want = oracle[i][j].map_or(Distance::Infinite, Distance::Hops);
                    prop_assert_eq!(got, want);
                    prop_assert_eq!(got, g.distance(LabelId(j as u32), LabelId(i as u32)));
                    if let Distance::Hops(dij) = got {
                        for k in 0..n {
                            if let Distance::Hops(djk) = g.distance(LabelId(j as u32), LabelId(k as u32)) {
                                let Distance::Hops(dik) = g.distance(LabelId(i as u32), LabelId(k as u32)) else {
                                    return Err(TestCaseError::fail("connected through j but not directly"));
                                };
                                prop_assert!(dik <= dij + djk);
                            }
                        }
                    }
                }
            }
        }

        #[test]
        fn adding_an_edge_never_lengthens_paths(n in 2usize..30, raw in prop::collection::vec((0u32..30, 0u32..30), 0..40), extra in (0u32..30, 0u32..30)) {
            let edges: Vec<(u32, u32)> = raw.into_iter().filter(|&(a, b)| (a as usize) < n && (b as usize) < n).collect();
            prop_assume!((extra.0 as usize) < n && (extra.1 as usize) < n && extra.0 != extra.1);
            let before = graph_of(n, &edges);
            let mut more = edges.clone();
            more.push(extra);
            let after = graph_of(n, &more);
            for i in 0..n as u32 {
                for j in 0..n as u32 {
                    prop_assert!(after.distance(LabelId(i), LabelId(j)) <= before.distance(LabelId(i), LabelId(j)));
                }
            }
        }

        #[test]
        fn adjacency_is_symmetric(n in 1usize..20, raw in prop::collection::vec((0u32..20, 0u32..20), 0..30)) {
            let edges: Vec<(u32, u32)> = raw.into_iter().filter(|&(a, b)| (a as usize) < n && (b as usize) < n).collect();
            let g = graph_of(n, &edges);
            for &a in g.nodes() {
                let ns = g.neighbors(a);
                prop_assert!(!ns.contains(&a));
                prop_assert!(ns.windows(2).all(|w| w[0] < w[1]));
                for b in ns {
                    prop_assert!(g.neighbors(b).contains(&a));
                }
            }
        }
    }
}
