use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use labelwork_core::{AnnotationSet, LabelCatalog, LabelId, LabelSet};

use super::{check_header, csv_error, csv_reader, csv_writer, open, record_line, warn, write_error, Loaded};
use crate::error::{Error, Result};

const HEADER: [&str; 2] = ["id", "attribute_ids"];

/// Ground-truth or binary-prediction rows. Every id must be in `catalog`.
pub fn read_annotations(path: &Path, catalog: &LabelCatalog) -> Result<Loaded<AnnotationSet>> {
    parse_annotations(open(path)?, path, catalog)
}

pub fn parse_annotations<R: Read>(input: R, path: &Path, catalog: &LabelCatalog) -> Result<Loaded<AnnotationSet>> {
    let mut reader = csv_reader(input, true);
    check_header(path, &mut reader, &HEADER)?;
    let mut warnings = Vec::new();
    let mut seen: BTreeMap<String, u64> = BTreeMap::new();
    let mut out = AnnotationSet::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = record_line(&row);
        let sample = row[0].trim();
        if sample.is_empty() {
            return Err(Error::parse(path, line, "empty sample id"));
        }
        if let Some(prev) = seen.insert(sample.to_string(), line) {
            return Err(Error::parse(
                path,
                line,
                format!("sample {sample:?} already listed on line {prev}"),
            ));
        }
        let mut labels = LabelSet::new();
        for tok in row[1].split_whitespace() {
            let id = LabelId(
                tok.parse()
                    .map_err(|_| Error::parse(path, line, format!("bad attribute id {tok:?}")))?,
            );
            if !catalog.contains(id) {
                return Err(Error::parse(
                    path,
                    line,
                    format!("attribute id {id} is not in the label file"),
                ));
            }
            if !labels.insert(id) {
                warn(
                    &mut warnings,
                    path,
                    line,
                    format!("sample {sample:?} lists attribute {id} twice"),
                );
            }
        }
        out.insert(sample, labels).map_err(|e| Error::invalid(path, e))?;
    }
    Ok(Loaded::new(out, warnings))
}

pub fn write_annotations<W: Write>(out: W, annotations: &AnnotationSet) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(HEADER).map_err(write_error)?;
    for (sample, labels) in annotations.iter() {
        let ids: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
        w.write_record([sample, ids.join(" ").as_str()]).map_err(write_error)?;
    }
    w.flush().map_err(|e| Error::io(Path::new("<output>"), e))
}
