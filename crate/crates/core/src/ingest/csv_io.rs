use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::CitationRecord;
use crate::error::{Error, Result};

pub const RECORD_HEADER: [&str; 6] = [
    "record_id",
    "citing_id",
    "cited_id",
    "section",
    "context",
    "gold_intent",
];

/// Writes records as RFC 4180 CSV. Returns the number of data rows.
pub fn write_records<W: Write>(records: &[CitationRecord], out: W) -> csv::Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        let gold = r.gold_intent.map(|g| g.to_string()).unwrap_or_default();
        w.write_record([
            r.record_id.as_str(),
            &r.citing_id,
            &r.cited_id,
            r.section.as_deref().unwrap_or(""),
            &r.context,
            &gold,
        ])?;
    }
    w.flush()?;
    Ok(records.len())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<CitationRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| Error::Format(format!("record csv header: {e}")))?;
    if header.iter().ne(RECORD_HEADER) {
        return Err(Error::Format(format!(
            "record csv header must be {}",
            RECORD_HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Error::Format(format!("record csv row {}: {e}", i + 1)))?;
        let gold_intent = match &row[5] {
            "" => None,
            g => Some(g.parse::<usize>().map_err(|_| {
                Error::Format(format!("record csv row {}: bad gold_intent {g:?}", i + 1))
            })?),
        };
        out.push(CitationRecord {
            record_id: row[0].to_owned(),
            citing_id: row[1].to_owned(),
            cited_id: row[2].to_owned(),
            section: (!row[3].is_empty()).then(|| row[3].to_owned()),
            context: row[4].to_owned(),
            gold_intent,
        });
    }
    Ok(out)
}

pub fn write_csv(records: &[CitationRecord], path: impl AsRef<Path>) -> Result<usize> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(records, file).map_err(|e| Error::csv(path, e))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<CitationRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_records(file).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(id: &str, ctx: &str, section: Option<&str>, gold: Option<usize>) -> CitationRecord {
        CitationRecord {
            record_id: id.into(),
            citing_id: format!("c{id}"),
            cited_id: format!("d{id}"),
            context: ctx.into(),
            section: section.map(Into::into),
            gold_intent: gold,
        }
    }

    #[test]
    fn empty_list_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        assert_eq!(write_csv(&[], &path).unwrap(), 0);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "record_id,citing_id,cited_id,section,context,gold_intent\n");
        assert!(read_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn embedded_delimiters_are_quoted_and_round_trip() {
        let recs = vec![
            rec("1", "uses X, Y, and Z", Some("Related, Work"), Some(0)),
            rec("2", "line one\nline \"two\"", None, None),
        ];
        let mut buf = Vec::new();
        write_records(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"uses X, Y, and Z\""));
        assert!(text.contains("\"line one\nline \"\"two\"\"\""));
        assert_eq!(read_records(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn unwritable_path_names_the_path() {
        let err = write_csv(&[], "/nonexistent-dir/x.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(read_records("a,b\n1,2\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_preserves_fields(
            rows in prop::collection::vec(
                ("[a-z0-9.]{1,8}", "\\PC{0,40}", prop::option::of("[A-Za-z ,\"\n]{1,12}"), prop::option::of(0usize..6)),
                0..20,
            )
        ) {
            let recs: Vec<_> = rows
                .iter()
                .enumerate()
                .map(|(i, (id, ctx, sec, g))| rec(&format!("{id}{i}"), ctx, sec.as_deref(), *g))
                .collect();
            let mut buf = Vec::new();
            write_records(&recs, &mut buf).unwrap();
            prop_assert_eq!(read_records(buf.as_slice()).unwrap(), recs);
        }
    }
}
