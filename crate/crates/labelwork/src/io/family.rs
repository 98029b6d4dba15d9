use std::io::{Read, Write};
use std::path::Path;

use labelwork_core::compare::{FamilyEntry, ModelFamily};

use super::{check_header, csv_error, csv_reader, csv_writer, open, record_line, write_error};
use crate::error::{Error, Result};

const HEADER: [&str; 3] = ["model", "f_score", "g_score"];

pub fn read_family(path: &Path) -> Result<ModelFamily> {
    parse_family(open(path)?, path)
}

pub fn parse_family<R: Read>(input: R, path: &Path) -> Result<ModelFamily> {
    let mut reader = csv_reader(input, true);
    check_header(path, &mut reader, &HEADER)?;
    let mut entries = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = record_line(&row);
        let score = |i: usize| -> Result<f64> {
            row[i]
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(path, line, format!("bad {} {:?}", HEADER[i], &row[i])))
        };
        entries.push(FamilyEntry {
            model: row[0].trim().to_string(),
            f_score: score(1)?,
            g_score: score(2)?,
        });
    }
    ModelFamily::new(entries).map_err(|e| Error::invalid(path, e))
}

/// Scores are written with 17 significant digits so they read back exactly.
pub fn write_family<W: Write>(out: W, family: &ModelFamily) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(HEADER).map_err(write_error)?;
    for e in family.entries() {
        w.write_record([
            e.model.clone(),
            format!("{:.16e}", e.f_score),
            format!("{:.16e}", e.g_score),
        ])
        .map_err(write_error)?;
    }
    w.flush().map_err(|e| Error::io(Path::new("<output>"), e))
}
