use std::io::{Read, Write};
use std::path::Path;

use labelwork_core::metrics::ScoreSet;
use labelwork_core::{LabelCatalog, LabelId};

use super::{check_header, csv_error, csv_reader, csv_writer, open, record_line, write_error, Loaded};
use crate::error::{Error, Result};

const HEADER: [&str; 3] = ["id", "attribute_id", "score"];

pub fn read_scores(path: &Path, catalog: &LabelCatalog) -> Result<Loaded<ScoreSet>> {
    parse_scores(open(path)?, path, catalog)
}

pub fn parse_scores<R: Read>(input: R, path: &Path, catalog: &LabelCatalog) -> Result<Loaded<ScoreSet>> {
    let mut reader = csv_reader(input, true);
    check_header(path, &mut reader, &HEADER)?;
    let mut scores = ScoreSet::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = record_line(&row);
        let sample = row[0].trim();
        let id = LabelId(
            row[1]
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, line, format!("bad attribute_id {:?}", &row[1])))?,
        );
        if !catalog.contains(id) {
            return Err(Error::parse(
                path,
                line,
                format!("attribute id {id} is not in the label file"),
            ));
        }
        let score: f64 = row[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad score {:?}", &row[2])))?;
        scores
            .insert(sample, id, score)
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
    }
    Ok(Loaded::new(scores, Vec::new()))
}

/// One row per stored entry, eight decimals.
pub fn write_scores<W: Write>(out: W, scores: &ScoreSet) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(HEADER).map_err(write_error)?;
    for (sample, label, score) in scores.iter() {
        w.write_record([sample, &label.to_string(), &format!("{score:.8}")])
            .map_err(write_error)?;
    }
    w.flush().map_err(|e| Error::io(Path::new("<output>"), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use labelwork_core::LabelRecord;

    fn catalog() -> LabelCatalog {
        LabelCatalog::from_records(
            (0..3)
                .map(|i| LabelRecord::new(LabelId(i), "tags", format!("t{i}")))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let text = "id,attribute_id,score\na,0,0.25\na,2,1\nb,1,0.00000001\n";
        let s = parse_scores(text.as_bytes(), Path::new("s.csv"), &catalog())
            .unwrap()
            .value;
        assert_eq!(s.entry_count(), 3);
        let mut out = Vec::new();
        write_scores(&mut out, &s).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("a,0,0.25000000\n"));
        let again = parse_scores(text.as_bytes(), Path::new("s.csv"), &catalog())
            .unwrap()
            .value;
        assert_eq!(again, s);
    }

    #[test]
    fn rejects_bad_rows() {
        for text in [
            "id,attribute_id,score\na,0,1.2\n",
            "id,attribute_id,score\na,0,0.5\na,0,0.4\n",
            "id,attribute_id,score\na,7,0.5\n",
            "id,attribute_id,score\na,0,nan\n",
        ] {
            let e = parse_scores(text.as_bytes(), Path::new("s.csv"), &catalog()).unwrap_err();
            assert!(matches!(e, Error::Parse { .. }), "{text}: {e}");
        }
    }
}
