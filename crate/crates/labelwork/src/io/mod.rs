//! Readers and writers for the delimited-text and JSON file formats.

mod annotations;
mod candidates;
mod edges;
mod family;
mod labels;
mod plan;
mod scores;

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

pub use annotations::{parse_annotations, read_annotations, write_annotations};
pub use candidates::{write_duplicate_candidates, write_hierarchy_candidates};
pub use edges::{parse_edges, read_edges, write_edges};
pub use family::{parse_family, read_family, write_family};
pub use labels::{parse_labels, read_labels, write_labels, DEFAULT_SEPARATOR};
pub use plan::{parse_plan, read_plan, resolve_name, write_plan, PlanFile};
pub use scores::{parse_scores, read_scores, write_scores};

use crate::error::{Error, Result};

/// A parsed value plus the non-fatal problems found while reading it.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

impl<T> Loaded<T> {
    fn new(value: T, warnings: Vec<String>) -> Self {
        Loaded { value, warnings }
    }
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub(crate) fn csv_reader<R: Read>(input: R, headers: bool) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(headers)
        .trim(csv::Trim::Headers)
        .from_reader(input)
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        kind => Error::parse(path, line, format!("{kind:?}")),
    }
}

pub(crate) fn check_header<R: Read>(path: &Path, reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let headers = reader.headers().map_err(|e| csv_error(path, e))?;
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::parse(
            path,
            1,
            format!(
                "expected header {:?}, found {:?}",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(())
}

pub(crate) fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

pub(crate) fn warn(warnings: &mut Vec<String>, path: &Path, line: u64, message: String) {
    let w = format!("{}:{line}: {message}", path.display());
    log::warn!("{w}");
    warnings.push(w);
}

pub(crate) fn csv_writer<W: std::io::Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub(crate) fn write_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(Path::new("<output>"), io),
        kind => Error::Config(format!("cannot write record: {kind:?}")),
    }
}
