use std::io::Write;
use std::path::Path;

use labelwork_core::cleanse::{DuplicateCandidate, HierarchyCandidate};
use labelwork_core::LabelCatalog;

use super::{csv_writer, write_error};
use crate::error::{Error, Result};

pub fn write_duplicate_candidates<W: Write>(
    out: W,
    pairs: &[DuplicateCandidate],
    catalog: &LabelCatalog,
    separator: &str,
) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "first_id",
        "first_name",
        "second_id",
        "second_name",
        "score",
        "dehyphenated",
    ])
    .map_err(write_error)?;
    for p in pairs {
        w.write_record([
            p.first.to_string(),
            catalog.require(p.first)?.attribute_name(separator),
            p.second.to_string(),
            catalog.require(p.second)?.attribute_name(separator),
            format!("{:.4}", p.score.value()),
            p.dehyphenated.to_string(),
        ])
        .map_err(write_error)?;
    }
    w.flush().map_err(|e| Error::io(Path::new("<output>"), e))
}

pub fn write_hierarchy_candidates<W: Write>(
    out: W,
    candidates: &[HierarchyCandidate],
    catalog: &LabelCatalog,
    separator: &str,
) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["parent_id", "parent_name", "child_id", "child_name", "evidence"])
        .map_err(write_error)?;
    for c in candidates {
        w.write_record([
            c.parent.to_string(),
            catalog.require(c.parent)?.attribute_name(separator),
            c.child.to_string(),
            catalog.require(c.child)?.attribute_name(separator),
            c.evidence.clone(),
        ])
        .map_err(write_error)?;
    }
    w.flush().map_err(|e| Error::io(Path::new("<output>"), e))
}
