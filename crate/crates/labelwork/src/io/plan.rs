use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use labelwork_core::cleanse::{AndSplit, HierarchyEdge, Merge, OrGroup, TransformPlan};
use labelwork_core::{LabelCatalog, LabelId, LabelRecord, LabelSet};

use super::open;
use crate::error::{Error, Result};

/// On-disk plan. Labels are written as attribute names so the file can be
/// edited by hand.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanFile {
    pub merges: Vec<MergeEntry>,
    pub hierarchy_edges: Vec<EdgeEntry>,
    pub and_splits: Vec<AndSplitEntry>,
    pub or_groups: Vec<OrGroupEntry>,
    pub exclusion_groups: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MergeEntry {
    pub survivor: String,
    pub absorbed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub parent: String,
    pub child: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AndSplitEntry {
    pub source: String,
    pub tokens: Vec<String>,
    #[serde(default)]
    pub remove_source: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrGroupEntry {
    pub source: String,
    pub components: Vec<String>,
}

/// Resolve an attribute name to an id. Among canonical duplicates an exact
/// surface match wins, then the lowest id.
pub fn resolve_name(catalog: &LabelCatalog, name: &str, separator: &str) -> Option<LabelId> {
    let probe = LabelRecord::from_attribute_name(LabelId(0), name.trim(), separator);
    let ids = catalog.lookup_all(&probe.category, &probe.name);
    ids.iter()
        .copied()
        .find(|&id| catalog.get(id).is_some_and(|r| r.name == probe.name))
        .or_else(|| ids.first().copied())
}

pub fn read_plan(path: &Path, catalog: &LabelCatalog, separator: &str) -> Result<TransformPlan> {
    parse_plan(open(path)?, path, catalog, separator)
}

pub fn parse_plan<R: Read>(input: R, path: &Path, catalog: &LabelCatalog, separator: &str) -> Result<TransformPlan> {
    let file: PlanFile =
        serde_json::from_reader(input).map_err(|e| Error::parse(path, e.line() as u64, e.to_string()))?;
    let id = |name: &String| {
        resolve_name(catalog, name, separator).ok_or_else(|| Error::UnknownName {
            path: path.to_path_buf(),
            name: name.clone(),
        })
    };
    let ids = |names: &[String]| names.iter().map(id).collect::<Result<Vec<_>>>();

    let plan = TransformPlan {
        merges: file
            .merges
            .iter()
            .map(|m| {
                Ok(Merge {
                    survivor: id(&m.survivor)?,
                    absorbed: ids(&m.absorbed)?,
                })
            })
            .collect::<Result<_>>()?,
        hierarchy_edges: file
            .hierarchy_edges
            .iter()
            .map(|e| {
                Ok(HierarchyEdge {
                    parent: id(&e.parent)?,
                    child: id(&e.child)?,
                })
            })
            .collect::<Result<_>>()?,
        and_splits: file
            .and_splits
            .iter()
            .map(|s| {
                Ok(AndSplit {
                    source: id(&s.source)?,
                    tokens: ids(&s.tokens)?,
                    remove_source: s.remove_source,
                })
            })
            .collect::<Result<_>>()?,
        or_groups: file
            .or_groups
            .iter()
            .map(|g| {
                Ok(OrGroup {
                    source: id(&g.source)?,
                    components: ids(&g.components)?,
                })
            })
            .collect::<Result<_>>()?,
        exclusion_groups: file
            .exclusion_groups
            .iter()
            .map(|g| Ok(ids(g)?.into_iter().collect::<LabelSet>()))
            .collect::<Result<_>>()?,
    };
    plan.validate(catalog).map_err(|e| Error::invalid(path, e))?;
    Ok(plan)
}

pub fn write_plan(plan: &TransformPlan, catalog: &LabelCatalog, separator: &str) -> Result<PlanFile> {
    let name = |id: LabelId| catalog.require(id).map(|r| r.attribute_name(separator));
    let names = |ids: &[LabelId]| ids.iter().map(|&i| name(i)).collect::<labelwork_core::Result<Vec<_>>>();
    Ok(PlanFile {
        merges: plan
            .merges
            .iter()
            .map(|m| {
                Ok(MergeEntry {
                    survivor: name(m.survivor)?,
                    absorbed: names(&m.absorbed)?,
                })
            })
            .collect::<labelwork_core::Result<_>>()?,
        hierarchy_edges: plan
            .hierarchy_edges
            .iter()
            .map(|e| {
                Ok(EdgeEntry {
                    parent: name(e.parent)?,
                    child: name(e.child)?,
                })
            })
            .collect::<labelwork_core::Result<_>>()?,
        and_splits: plan
            .and_splits
            .iter()
            .map(|s| {
                Ok(AndSplitEntry {
                    source: name(s.source)?,
                    tokens: names(&s.tokens)?,
                    remove_source: s.remove_source,
                })
            })
            .collect::<labelwork_core::Result<_>>()?,
        or_groups: plan
            .or_groups
            .iter()
            .map(|g| {
                Ok(OrGroupEntry {
                    source: name(g.source)?,
                    components: names(&g.components)?,
                })
            })
            .collect::<labelwork_core::Result<_>>()?,
        exclusion_groups: plan
            .exclusion_groups
            .iter()
            .map(|g| names(g.as_slice()))
            .collect::<labelwork_core::Result<_>>()?,
    })
}
