//! Records, label schemas, embeddings and dataset splits.

mod cemb;
mod csv_io;
mod jsonl;
mod record;
mod schema;
mod split;

pub use cemb::{
    read_embeddings, read_embeddings_from, write_embeddings, write_embeddings_to, EmbeddingSet,
    CEMB_MAGIC, CEMB_VERSION,
};
pub use csv_io::{read_csv, read_records, write_csv, write_records, RECORD_HEADER};
pub use jsonl::{parse_jsonl, parse_unarxive, FieldMap, ParseOutcome, Skip, SkipReason, SkipReport};
pub use record::CitationRecord;
pub use schema::{LabelSchema, FAKE_LABEL};
pub use split::{
    make_split, read_split, stratified_holdout, write_split, DatasetSplit, Partition,
    SPLIT_HEADER,
};
