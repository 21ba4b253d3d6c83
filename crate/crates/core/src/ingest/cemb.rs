//! CEMB: the binary embedding interchange format.
//!
//! ```text
//! magic   "CEMB"            4 bytes
//! version u32 LE = 1
//! dim     u32 LE
//! count   u64 LE
//! count × { id_len u32 LE, id UTF-8 bytes, dim × f32 LE }
//! ```
//!
//! No padding and no trailing bytes.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const CEMB_MAGIC: [u8; 4] = *b"CEMB";
pub const CEMB_VERSION: u32 = 1;
const HEADER_LEN: u64 = 4 + 4 + 4 + 8;

/// Dense vectors keyed by record id, kept in insertion order so
/// re-serialization is byte-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    dim: usize,
    ids: Vec<String>,
    values: Vec<f32>,
    index: HashMap<String, usize>,
}

impl EmbeddingSet {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > u32::MAX as usize {
            return Err(Error::Parameter(format!("embedding dim {dim} out of range")));
        }
        Ok(Self {
            dim,
            ids: Vec::new(),
            values: Vec::new(),
            index: HashMap::new(),
        })
    }

    pub fn push(&mut self, id: impl Into<String>, vector: &[f32]) -> Result<()> {
        let id = id.into();
        if vector.len() != self.dim {
            return Err(Error::Validation(format!(
                "embedding {id:?} has length {}, expected {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "embedding {id:?} contains a non-finite value"
            )));
        }
        if self.index.contains_key(&id) {
            return Err(Error::Validation(format!("duplicate embedding id {id:?}")));
        }
        self.index.insert(id.clone(), self.ids.len());
        self.ids.push(id);
        self.values.extend_from_slice(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.index.get(id).map(|&i| self.row(i))
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), self.row(i)))
    }
}

pub fn write_embeddings_to<W: Write>(set: &EmbeddingSet, out: W) -> io::Result<()> {
    let mut w = BufWriter::new(out);
    w.write_all(&CEMB_MAGIC)?;
    w.write_all(&CEMB_VERSION.to_le_bytes())?;
    w.write_all(&(set.dim as u32).to_le_bytes())?;
    w.write_all(&(set.len() as u64).to_le_bytes())?;
    for (id, row) in set.iter() {
        w.write_all(&(id.len() as u32).to_le_bytes())?;
        w.write_all(id.as_bytes())?;
        for v in row {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()
}

pub fn write_embeddings(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_embeddings_to(set, file).map_err(|e| Error::io(path, e))
}

struct OffsetReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> OffsetReader<R> {
    fn fill(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        let start = self.offset;
        let mut filled = 0;
        while filled < buf.len() {
            match self.inner.read(&mut buf[filled..]) {
                Ok(0) => {
                    return Err(Error::Corruption {
                        offset: start,
                        message: format!(
                            "truncated {what}: needed {} bytes, found {filled}",
                            buf.len()
                        ),
                    })
                }
                Ok(n) => filled += n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Err(Error::io("<cemb stream>", e)),
            }
        }
        self.offset += buf.len() as u64;
        Ok(())
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let mut b = [0; 4];
        self.fill(&mut b, what)?;
        Ok(u32::from_le_bytes(b))
    }
}

pub fn read_embeddings_from<R: Read>(input: R) -> Result<EmbeddingSet> {
    let mut r = OffsetReader {
        inner: input,
        offset: 0,
    };
    let mut magic = [0; 4];
    r.fill(&mut magic, "magic")
        .map_err(|_| Error::Format("bad magic: file shorter than 4 bytes".into()))?;
    if magic != CEMB_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:02x?}")));
    }
    let version = r.u32("version")?;
    if version != CEMB_VERSION {
        return Err(Error::Format(format!("unsupported CEMB version {version}")));
    }
    let dim = r.u32("dim")? as usize;
    if dim == 0 {
        return Err(Error::Format("CEMB dim must be positive".into()));
    }
    let mut count_bytes = [0; 8];
    r.fill(&mut count_bytes, "count")?;
    let count = u64::from_le_bytes(count_bytes);
    debug_assert_eq!(r.offset, HEADER_LEN);

    let mut set = EmbeddingSet::new(dim)?;
    let mut row_bytes = vec![0u8; dim * 4];
    let mut row = vec![0f32; dim];
    for i in 0..count {
        let id_len = r.u32(&format!("id length of record {i}"))? as usize;
        let mut id = vec![0; id_len];
        r.fill(&mut id, &format!("id of record {i}"))?;
        let id_offset = r.offset - id_len as u64;
        let id = String::from_utf8(id).map_err(|_| Error::Corruption {
            offset: id_offset,
            message: format!("record {i} id is not UTF-8"),
        })?;
        r.fill(&mut row_bytes, &format!("vector of record {id:?}"))?;
        for (dst, chunk) in row.iter_mut().zip(row_bytes.chunks_exact(4)) {
            *dst = f32::from_le_bytes(chunk.try_into().expect("4-byte chunk"));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "record {id:?} contains a non-finite value"
            )));
        }
        set.push(id, &row)?;
    }
    let mut probe = [0u8; 1];
    match r.inner.read(&mut probe) {
        Ok(0) => Ok(set),
        Ok(_) => Err(Error::Corruption {
            offset: r.offset,
            message: "trailing bytes after last record".into(),
        }),
        Err(e) => Err(Error::io("<cemb stream>", e)),
    }
}

pub fn read_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_embeddings_from(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn encode(set: &EmbeddingSet) -> Vec<u8> {
        let mut buf = Vec::new();
        write_embeddings_to(set, &mut buf).unwrap();
        buf
    }

    fn random_set(dim: usize, count: usize, seed: u64) -> EmbeddingSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set = EmbeddingSet::new(dim).unwrap();
        for i in 0..count {
            let v: Vec<f32> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
            set.push(format!("id-{i}"), &v).unwrap();
        }
        set
    }

    #[test]
    fn empty_set_keeps_dim() {
        let set = EmbeddingSet::new(768).unwrap();
        let bytes = encode(&set);
        assert_eq!(bytes.len(), 20);
        assert_eq!(&bytes[..4], b"CEMB");
        let back = read_embeddings_from(bytes.as_slice()).unwrap();
        assert_eq!(back.dim(), 768);
        assert!(back.is_empty());
    }

    #[test]
    fn three_vectors_round_trip_exactly() {
        let set = random_set(5, 3, 11);
        let back = read_embeddings_from(encode(&set).as_slice()).unwrap();
        for (id, row) in set.iter() {
            let got = back.get(id).unwrap();
            assert!(row.iter().zip(got).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn layout_is_bit_exact() {
        let mut set = EmbeddingSet::new(2).unwrap();
        set.push("ab", &[1.0, -2.5]).unwrap();
        let bytes = encode(&set);
        let mut expected = b"CEMB".to_vec();
        expected.extend(1u32.to_le_bytes());
        expected.extend(2u32.to_le_bytes());
        expected.extend(1u64.to_le_bytes());
        expected.extend(2u32.to_le_bytes());
        expected.extend(b"ab");
        expected.extend(1.0f32.to_le_bytes());
        expected.extend((-2.5f32).to_le_bytes());
        assert_eq!(bytes, expected);
    }

    #[test]
    fn missing_row_reports_offset_of_first_absent_record() {
        let set = random_set(4, 5, 3);
        let mut bytes = encode(&set);
        // each record: 4 (len) + 4 ("id-N") + 16 (vector) = 24 bytes
        let record_len = 4 + 4 + 4 * 4;
        bytes.truncate(bytes.len() - record_len);
        let expected_offset = HEADER_LEN + 4 * record_len as u64;
        match read_embeddings_from(bytes.as_slice()) {
            Err(Error::Corruption { offset, .. }) => assert_eq!(offset, expected_offset),
            other => panic!("expected corruption, got {other:?}"),
        }
    }

    #[test]
    fn format_errors() {
        let set = random_set(3, 2, 5);
        let mut bytes = encode(&set);
        bytes[0] ^= 0xff;
        assert!(matches!(
            read_embeddings_from(bytes.as_slice()),
            Err(Error::Format(_))
        ));

        let mut bytes = encode(&set);
        bytes[4] = 2;
        assert!(matches!(
            read_embeddings_from(bytes.as_slice()),
            Err(Error::Format(_))
        ));

        let mut bytes = encode(&set);
        bytes.push(0);
        assert!(matches!(
            read_embeddings_from(bytes.as_slice()),
            Err(Error::Corruption { .. })
        ));
    }

    #[test]
    fn non_finite_value_names_the_record() {
        let set = random_set(3, 3, 9);
        let mut bytes = encode(&set);
        // second record's first float: header + record0 (4+4+12) + len + id
        let pos = HEADER_LEN as usize + 20 + 4 + 4;
        bytes[pos..pos + 4].copy_from_slice(&f32::NAN.to_le_bytes());
        let err = read_embeddings_from(bytes.as_slice()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("id-1"));
    }

    #[test]
    fn push_validates() {
        let mut set = EmbeddingSet::new(2).unwrap();
        assert!(set.push("a", &[1.0]).is_err());
        assert!(set.push("a", &[f32::INFINITY, 0.0]).is_err());
        set.push("a", &[0.0, 0.0]).unwrap();
        assert!(set.push("a", &[0.0, 0.0]).is_err());
        assert!(EmbeddingSet::new(0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn reserialization_is_byte_identical(dim in 1usize..1024, count in 0usize..100, seed: u64) {
            let set = random_set(dim, count, seed);
            let bytes = encode(&set);
            let back = read_embeddings_from(bytes.as_slice()).unwrap();
            prop_assert_eq!(back.len(), count);
            prop_assert_eq!(encode(&back), bytes);
        }
    }
}
