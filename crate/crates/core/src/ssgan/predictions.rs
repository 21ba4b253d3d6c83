use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::Prediction;
use crate::ingest::LabelSchema;
use crate::scalar::fmt_float;
use crate::{Error, Result};

pub const PREDICTION_HEADER: [&str; 3] = ["record_id", "intent", "confidence"];

pub fn write_predictions<W: Write>(preds: &[Prediction], schema: &LabelSchema, out: W) -> Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::Format(format!("prediction csv: {e}"));
    w.write_record(PREDICTION_HEADER).map_err(wrap)?;
    for p in preds {
        let label = schema
            .name(p.intent)
            .ok_or_else(|| Error::Validation(format!("intent {} outside schema", p.intent)))?;
        w.write_record([p.record_id.as_str(), label, &fmt_float(p.confidence)])
            .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::Format(format!("prediction csv: {e}")))?;
    Ok(preds.len())
}

pub fn read_predictions<R: Read>(input: R, schema: &LabelSchema) -> Result<Vec<Prediction>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| Error::Format(format!("prediction csv header: {e}")))?;
    if header.iter().ne(PREDICTION_HEADER) {
        return Err(Error::Format(format!(
            "prediction csv header must be {}",
            PREDICTION_HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Format(format!("prediction csv line {line}: {e}")))?;
        let intent = schema
            .index_of(&row[1])
            .ok_or_else(|| Error::Validation(format!("prediction csv line {line}: unknown intent {:?}", &row[1])))?;
        let confidence = row[2]
            .parse()
            .map_err(|_| Error::Format(format!("prediction csv line {line}: bad confidence {:?}", &row[2])))?;
        out.push(Prediction {
            record_id: row[0].to_owned(),
            intent,
            confidence,
        });
    }
    Ok(out)
}

pub fn write_predictions_file(preds: &[Prediction], schema: &LabelSchema, path: impl AsRef<Path>) -> Result<usize> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_predictions(preds, schema, file)
}

pub fn read_predictions_file(path: impl AsRef<Path>, schema: &LabelSchema) -> Result<Vec<Prediction>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_predictions(file, schema).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        Error::Validation(m) => Error::Validation(format!("{}: {m}", path.display())),
        other => other,
    })
}
