use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CitationRecord, LabelSchema};
use crate::error::{Error, Result};

/// Train/dev/test partition of record ids. Gold labels are kept for every
/// partition except `unlabeled_train`, whose labels are masked.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetSplit {
    pub labeled_train: Vec<String>,
    pub unlabeled_train: Vec<String>,
    pub dev: Vec<String>,
    pub test: Vec<String>,
    pub gold: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partition {
    Labeled,
    Unlabeled,
    Dev,
    Test,
}

impl Partition {
    pub fn as_str(self) -> &'static str {
        match self {
            Partition::Labeled => "labeled",
            Partition::Unlabeled => "unlabeled",
            Partition::Dev => "dev",
            Partition::Test => "test",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "labeled" => Partition::Labeled,
            "unlabeled" => Partition::Unlabeled,
            "dev" => Partition::Dev,
            "test" => Partition::Test,
            _ => return None,
        })
    }
}

fn group_by_class(records: &[CitationRecord]) -> BTreeMap<usize, Vec<&CitationRecord>> {
    let mut by_class: BTreeMap<usize, Vec<&CitationRecord>> = BTreeMap::new();
    for r in records {
        if let Some(g) = r.gold_intent {
            by_class.entry(g).or_default().push(r);
        }
    }
    by_class
}

/// Splits a training pool into labeled and unlabeled parts, stratified by
/// gold intent. Each class contributes `round(fraction * n_class)` labeled
/// records; records without a gold label always go to `unlabeled_train`.
pub fn make_split(
    records: &[CitationRecord],
    schema: &LabelSchema,
    labeled_fraction: f64,
    seed: u64,
) -> Result<DatasetSplit> {
    if !(labeled_fraction > 0.0 && labeled_fraction <= 1.0) {
        return Err(Error::Parameter(format!(
            "labeled_fraction {labeled_fraction} not in (0, 1]"
        )));
    }
    let by_class = group_by_class(records);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labeled = HashSet::new();
    let mut split = DatasetSplit::default();
    for class in 0..schema.k() {
        let members = by_class.get(&class).map(Vec::as_slice).unwrap_or_default();
        let take = (labeled_fraction * members.len() as f64).round() as usize;
        if take == 0 {
            return Err(Error::Parameter(format!(
                "labeled_fraction {labeled_fraction} leaves class {:?} ({} records) without labeled examples",
                schema.name(class).unwrap_or("?"),
                members.len()
            )));
        }
        let mut order: Vec<usize> = (0..members.len()).collect();
        order.shuffle(&mut rng);
        for &i in &order[..take] {
            labeled.insert(members[i].record_id.as_str());
        }
    }
    if let Some(bad) = by_class.keys().find(|&&c| c >= schema.k()) {
        return Err(Error::Validation(format!(
            "gold intent {bad} outside schema of {} labels",
            schema.k()
        )));
    }
    for r in records {
        if labeled.contains(r.record_id.as_str()) {
            split.labeled_train.push(r.record_id.clone());
            split.gold.insert(r.record_id.clone(), r.gold_intent.expect("labeled"));
        } else {
            split.unlabeled_train.push(r.record_id.clone());
        }
    }
    Ok(split)
}

/// Moves a stratified `fraction` of the gold-labeled records out of `records`.
/// Returns `(kept, held_out)`, both in input order.
pub fn stratified_holdout(
    records: &[CitationRecord],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<CitationRecord>, Vec<CitationRecord>)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Parameter(format!(
            "holdout fraction {fraction} not in [0, 1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut held = HashSet::new();
    for members in group_by_class(records).values() {
        let take = (fraction * members.len() as f64).round() as usize;
        let mut order: Vec<usize> = (0..members.len()).collect();
        order.shuffle(&mut rng);
        for &i in &order[..take] {
            held.insert(members[i].record_id.as_str());
        }
    }
    let (out, kept): (Vec<_>, Vec<_>) = records
        .iter()
        .cloned()
        .partition(|r| held.contains(r.record_id.as_str()));
    Ok((kept, out))
}

impl DatasetSplit {
    fn add_gold_partition(
        &mut self,
        records: &[CitationRecord],
        which: Partition,
    ) -> Result<()> {
        for r in records {
            let g = r.gold_intent.ok_or_else(|| {
                Error::Validation(format!(
                    "{} record {:?} has no gold intent",
                    which.as_str(),
                    r.record_id
                ))
            })?;
            self.gold.insert(r.record_id.clone(), g);
            match which {
                Partition::Dev => self.dev.push(r.record_id.clone()),
                _ => self.test.push(r.record_id.clone()),
            }
        }
        self.validate()
    }

    pub fn with_dev(mut self, records: &[CitationRecord]) -> Result<Self> {
        self.add_gold_partition(records, Partition::Dev)?;
        Ok(self)
    }

    pub fn with_test(mut self, records: &[CitationRecord]) -> Result<Self> {
        self.add_gold_partition(records, Partition::Test)?;
        Ok(self)
    }

    pub fn partitions(&self) -> [(Partition, &[String]); 4] {
        [
            (Partition::Labeled, &self.labeled_train),
            (Partition::Unlabeled, &self.unlabeled_train),
            (Partition::Dev, &self.dev),
            (Partition::Test, &self.test),
        ]
    }

    /// Checks disjointness and that every labeled, dev and test id has a gold label.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for (part, ids) in self.partitions() {
            for id in ids {
                if !seen.insert(id.as_str()) {
                    return Err(Error::Validation(format!(
                        "record {id:?} appears in more than one partition"
                    )));
                }
                if part != Partition::Unlabeled && !self.gold.contains_key(id) {
                    return Err(Error::Validation(format!(
                        "{} record {id:?} has no gold intent",
                        part.as_str()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.partitions().iter().map(|(_, ids)| ids.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub const SPLIT_HEADER: [&str; 3] = ["record_id", "partition", "label"];

/// Writes the split file: `record_id,partition,label`, label as schema name.
pub fn write_split(split: &DatasetSplit, schema: &LabelSchema, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let csv_err = |e| Error::csv(path, e);
    w.write_record(SPLIT_HEADER).map_err(csv_err)?;
    for (part, ids) in split.partitions() {
        for id in ids {
            let label = match part {
                Partition::Unlabeled => "",
                _ => split
                    .gold
                    .get(id)
                    .and_then(|&g| schema.name(g))
                    .unwrap_or(""),
            };
            w.write_record([id.as_str(), part.as_str(), label])
                .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_split(path: impl AsRef<Path>, schema: &LabelSchema) -> Result<DatasetSplit> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let header = rdr.headers().map_err(|e| Error::csv(path, e))?;
    if header.iter().ne(SPLIT_HEADER) {
        return Err(Error::Format(format!(
            "{}: split header must be {}",
            path.display(),
            SPLIT_HEADER.join(",")
        )));
    }
    let mut split = DatasetSplit::default();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        let bad = |what: &str| {
            Error::Format(format!("{}: row {}: {what}", path.display(), i + 1))
        };
        let id = row[0].to_owned();
        let part = Partition::parse(&row[1]).ok_or_else(|| bad("unknown partition"))?;
        if !row[2].is_empty() {
            let g = schema
                .index_of(&row[2])
                .ok_or_else(|| bad(&format!("label {:?} not in schema", &row[2])))?;
            if part != Partition::Unlabeled {
                split.gold.insert(id.clone(), g);
            }
        }
        match part {
            Partition::Labeled => split.labeled_train.push(id),
            Partition::Unlabeled => split.unlabeled_train.push(id),
            Partition::Dev => split.dev.push(id),
            Partition::Test => split.test.push(id),
        }
    }
    split.validate()?;
    Ok(split)
}
