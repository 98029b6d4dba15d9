use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use labelwork_core::{LabelCatalog, LabelId, LabelRecord};

use super::{check_header, csv_error, csv_reader, csv_writer, open, record_line, warn, write_error, Loaded};
use crate::error::{Error, Result};

pub const DEFAULT_SEPARATOR: &str = "::";

const HEADER: [&str; 2] = ["attribute_id", "attribute_name"];

pub fn read_labels(path: &Path, separator: &str) -> Result<Loaded<LabelCatalog>> {
    parse_labels(open(path)?, path, separator)
}

/// `path` is only used in messages.
pub fn parse_labels<R: Read>(input: R, path: &Path, separator: &str) -> Result<Loaded<LabelCatalog>> {
    if separator.is_empty() {
        return Err(Error::Config("category separator must not be empty".into()));
    }
    let mut reader = csv_reader(input, true);
    check_header(path, &mut reader, &HEADER)?;
    let mut warnings = Vec::new();
    let mut first_line: BTreeMap<u32, u64> = BTreeMap::new();
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = record_line(&row);
        if row.len() != 2 {
            return Err(Error::parse(
                path,
                line,
                format!("expected 2 fields, found {}", row.len()),
            ));
        }
        let id: u32 = row[0]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad attribute_id {:?}", &row[0])))?;
        if let Some(prev) = first_line.insert(id, line) {
            return Err(Error::parse(
                path,
                line,
                format!("attribute_id {id} already defined on line {prev}"),
            ));
        }
        let name = row[1].trim();
        if name.is_empty() {
            return Err(Error::parse(path, line, "empty attribute_name"));
        }
        let record = LabelRecord::from_attribute_name(LabelId(id), name, separator);
        if !record.has_category {
            warn(
                &mut warnings,
                path,
                line,
                format!("{name:?} has no {separator:?} separator; filed as uncategorized"),
            );
        }
        records.push(record);
    }
    let catalog = LabelCatalog::from_records(records).map_err(|e| Error::invalid(path, e))?;
    Ok(Loaded::new(catalog, warnings))
}

pub fn write_labels<W: Write>(out: W, catalog: &LabelCatalog, separator: &str) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(HEADER).map_err(write_error)?;
    for r in catalog.iter() {
        w.write_record([r.id.to_string(), r.attribute_name(separator)])
            .map_err(write_error)?;
    }
    w.flush().map_err(|e| Error::io(Path::new("<output>"), e))
}
