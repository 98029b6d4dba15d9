use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use labelwork_core::graph::RelationGraph;
use labelwork_core::{LabelCatalog, LabelId};

use super::{csv_writer, open, plan::resolve_name, write_error};
use crate::error::{Error, Result};

/// Curated edges: two attribute names per row, no header, `#` comments.
pub fn read_edges(path: &Path, catalog: &LabelCatalog, separator: &str) -> Result<Vec<(LabelId, LabelId)>> {
    parse_edges(open(path)?, path, catalog, separator)
}

pub fn parse_edges<R: Read>(
    input: R,
    path: &Path,
    catalog: &LabelCatalog,
    separator: &str,
) -> Result<Vec<(LabelId, LabelId)>> {
    // csv's own comment handling loses line numbers, so lines are split here
    let mut edges = Vec::new();
    for (i, text) in BufReader::new(input).lines().enumerate() {
        let line = i as u64 + 1;
        let text = text.map_err(|e| Error::io(path, e))?;
        if text.trim().is_empty() || text.trim_start().starts_with('#') {
            continue;
        }
        let row = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(text.as_bytes())
            .records()
            .next()
            .transpose()
            .map_err(|e| Error::parse(path, line, e.to_string()))?
            .unwrap_or_default();
        if row.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if row.len() != 2 {
            return Err(Error::parse(
                path,
                line,
                format!("expected 2 attribute names, found {}", row.len()),
            ));
        }
        let mut ends = [LabelId(0); 2];
        for (slot, name) in ends.iter_mut().zip(row.iter()) {
            *slot = resolve_name(catalog, name, separator)
                .ok_or_else(|| Error::parse(path, line, format!("unknown label name {:?}", name.trim())))?;
        }
        if ends[0] == ends[1] {
            return Err(Error::parse(path, line, format!("self-edge on {:?}", row[0].trim())));
        }
        edges.push((ends[0], ends[1]));
    }
    Ok(edges)
}

/// Edge list in the curated format, endpoints ordered by id.
pub fn write_edges<W: Write>(out: W, graph: &RelationGraph, catalog: &LabelCatalog, separator: &str) -> Result<()> {
    let mut w = csv_writer(out);
    for (a, b) in graph.edges() {
        let na = catalog.require(a)?.attribute_name(separator);
        let nb = catalog.require(b)?.attribute_name(separator);
        w.write_record([na, nb]).map_err(write_error)?;
    }
    w.flush().map_err(|e| Error::io(Path::new("<output>"), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use labelwork_core::LabelRecord;

    fn catalog() -> LabelCatalog {
        let names = ["france", "french", "united kingdom", "england"];
        LabelCatalog::from_records(
            names
                .iter()
                .enumerate()
                .map(|(i, n)| LabelRecord::new(LabelId(i as u32), "country", *n))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn comments_blank_lines_and_round_trip() {
        let text = "# curated\ncountry::french,country::france\n\ncountry::united kingdom, country::england\n";
        let cat = catalog();
        let edges = parse_edges(text.as_bytes(), Path::new("e.csv"), &cat, "::").unwrap();
        assert_eq!(edges, vec![(LabelId(1), LabelId(0)), (LabelId(2), LabelId(3))]);
        let g = RelationGraph::from_edges(cat.ids(), edges).unwrap();
        let mut out = Vec::new();
        write_edges(&mut out, &g, &cat, "::").unwrap();
        let again = parse_edges(out.as_slice(), Path::new("e.csv"), &cat, "::").unwrap();
        assert_eq!(RelationGraph::from_edges(cat.ids(), again).unwrap(), g);
    }

    #[test]
    fn bad_rows() {
        let cat = catalog();
        for (text, line) in [
            ("country::france,country::narnia\n", 1),
            ("# c\ncountry::france,country::france\n", 2),
            ("country::france\n", 1),
        ] {
            match parse_edges(text.as_bytes(), Path::new("e.csv"), &cat, "::") {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
