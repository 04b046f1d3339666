//! Binary container shared by count, weighted and dense models.
//!
//! All integers are little-endian. A file is a fixed header followed by
//! tagged sections and a terminating `END\0` section:
//!
//! ```text
//! header   magic "DSMFILE\0" (8 bytes) | version u16 (=1) | kind u8 | reserved u8 (=0)
//!          kind: 1 = counts, 2 = weighted, 3 = dense
//! section  tag [u8; 4] | payload length u64 | payload
//!
//! META     n u32, then n × (key: u32 len + UTF-8, value: u32 len + UTF-8), keys ascending
//! VOCB     min_context_freq u64 | n u32 | n × (lemma: u32 len + UTF-8 | pos u8 ('N','V','J','O') | freq u64)
//! LAYT     n_rows u32 | n_rows × row word id u32 | n_cols u32 | n_cols × column word id u32
//! CSRM     nnz u64 | (n_rows + 1) × row pointer u64 | nnz × column index u32 | nnz × value
//!          (value is u64 in count files, f64 in weighted files)
//! MARG     total u64 | n_rows × row marginal u64 | n_cols × column marginal u64     (counts only)
//! SVAL     k u32 | k × singular value f64                                            (dense only)
//! VECS     n_rows u32 | k u32 | n_rows × k f64, row-major                             (dense only)
//! END\0    empty
//! ```
//!
//! Section order is fixed per kind: counts `META VOCB LAYT CSRM MARG`,
//! weighted `META VOCB LAYT CSRM`, dense `META VOCB LAYT SVAL VECS`, where the
//! dense `LAYT` carries no columns (`n_cols = 0`).
//!
//! `META` holds typed fields under reserved keys (`window`, `window_over`,
//! `corpus_tokens`, `scheme`, `log_base`, `k`, `eigen_weight`, `seed`); every
//! other key is provenance and round-trips untouched.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use byteorder::{LittleEndian as LE, WriteBytesExt};

use crate::cooccur::{CooccurrenceMatrix, WindowOver};
use crate::error::{Error, Result};
use crate::sparse::Csr;
use crate::svd::{DenseModel, EigenWeight};
use crate::vocab::{Pos, Vocabulary, Word, WordId};
use crate::weighting::{Scheme, WeightedMatrix};

pub const MAGIC: &[u8; 8] = b"DSMFILE\0";
pub const VERSION: u16 = 1;

const RESERVED: &[&str] = &[
    "window",
    "window_over",
    "corpus_tokens",
    "scheme",
    "log_base",
    "k",
    "eigen_weight",
    "seed",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Counts = 1,
    Weighted = 2,
    Dense = 3,
}

impl Kind {
    fn from_byte(b: u8) -> Option<Kind> {
        match b {
            1 => Some(Kind::Counts),
            2 => Some(Kind::Weighted),
            3 => Some(Kind::Dense),
            _ => None,
        }
    }
}

/// Any model file, as dispatched on its header.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyModel {
    Counts(CooccurrenceMatrix),
    Weighted(WeightedMatrix),
    Dense(DenseModel),
}

impl AnyModel {
    pub fn provenance(&self) -> &BTreeMap<String, String> {
        match self {
            AnyModel::Counts(m) => &m.provenance,
            AnyModel::Weighted(m) => &m.provenance,
            AnyModel::Dense(m) => &m.provenance,
        }
    }

    pub fn vocab(&self) -> &Vocabulary {
        match self {
            AnyModel::Counts(m) => m.vocab(),
            AnyModel::Weighted(m) => m.vocab(),
            AnyModel::Dense(m) => m.vocab(),
        }
    }
}

// ---------------------------------------------------------------- writing

struct FileWriter {
    out: Vec<u8>,
}

impl FileWriter {
    fn new(kind: Kind) -> Self {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.write_u16::<LE>(VERSION).unwrap();
        out.push(kind as u8);
        out.push(0);
        FileWriter { out }
    }

    fn section(&mut self, tag: &[u8; 4], payload: Vec<u8>) {
        self.out.extend_from_slice(tag);
        self.out.write_u64::<LE>(payload.len() as u64).unwrap();
        self.out.extend_from_slice(&payload);
    }

    fn finish(mut self, path: &Path) -> Result<()> {
        self.section(b"END\0", Vec::new());
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&self.out).map_err(|e| Error::io(path, e))?;
        f.sync_all().map_err(|e| Error::io(path, e))
    }
}

fn put_str(buf: &mut Vec<u8>, s: &str) {
    buf.write_u32::<LE>(s.len() as u32).unwrap();
    buf.extend_from_slice(s.as_bytes());
}

fn meta_section(typed: Vec<(&str, String)>, provenance: &BTreeMap<String, String>) -> Vec<u8> {
    let mut all: BTreeMap<&str, &str> = provenance
        .iter()
        .filter(|(k, _)| !RESERVED.contains(&k.as_str()))
        .map(|(k, v)| (k.as_str(), v.as_str()))
        .collect();
    for (k, v) in &typed {
        all.insert(k, v);
    }
    let mut buf = Vec::new();
    buf.write_u32::<LE>(all.len() as u32).unwrap();
    for (k, v) in all {
        put_str(&mut buf, k);
        put_str(&mut buf, v);
    }
    buf
}

fn vocab_section(v: &Vocabulary) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.write_u64::<LE>(v.min_context_freq()).unwrap();
    buf.write_u32::<LE>(v.len() as u32).unwrap();
    for (w, &f) in v.words().iter().zip(v.freqs()) {
        put_str(&mut buf, &w.lemma);
        buf.push(w.pos.to_byte());
        buf.write_u64::<LE>(f).unwrap();
    }
    buf
}

fn layout_section(rows: &[WordId], cols: &[WordId]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(8 + 4 * (rows.len() + cols.len()));
    buf.write_u32::<LE>(rows.len() as u32).unwrap();
    rows.iter().for_each(|&r| buf.write_u32::<LE>(r).unwrap());
    buf.write_u32::<LE>(cols.len() as u32).unwrap();
    cols.iter().for_each(|&c| buf.write_u32::<LE>(c).unwrap());
    buf
}

fn csr_section<T: Copy>(m: &Csr<T>, mut put: impl FnMut(&mut Vec<u8>, T)) -> Vec<u8> {
    let mut buf = Vec::with_capacity(8 + 8 * (m.n_rows() + 1) + 16 * m.nnz());
    buf.write_u64::<LE>(m.nnz() as u64).unwrap();
    m.indptr().iter().for_each(|&p| buf.write_u64::<LE>(p as u64).unwrap());
    m.indices().iter().for_each(|&c| buf.write_u32::<LE>(c).unwrap());
    m.values().iter().for_each(|&v| put(&mut buf, v));
    buf
}

pub fn save_counts(m: &CooccurrenceMatrix, path: &Path) -> Result<()> {
    let mut w = FileWriter::new(Kind::Counts);
    w.section(
        b"META",
        meta_section(
            vec![
                ("window", m.window.to_string()),
                ("window_over", m.window_over.to_string()),
                ("corpus_tokens", m.corpus_tokens.to_string()),
            ],
            &m.provenance,
        ),
    );
    w.section(b"VOCB", vocab_section(&m.vocab));
    w.section(b"LAYT", layout_section(&m.rows, &m.cols));
    w.section(b"CSRM", csr_section(&m.counts, |b, v| b.write_u64::<LE>(v).unwrap()));
    let mut marg = Vec::with_capacity(8 * (1 + m.rows.len() + m.cols.len()));
    marg.write_u64::<LE>(m.total).unwrap();
    m.row_marginals.iter().for_each(|&v| marg.write_u64::<LE>(v).unwrap());
    m.col_marginals.iter().for_each(|&v| marg.write_u64::<LE>(v).unwrap());
    w.section(b"MARG", marg);
    w.finish(path)
}

pub fn save_weighted(m: &WeightedMatrix, path: &Path) -> Result<()> {
    let mut w = FileWriter::new(Kind::Weighted);
    w.section(
        b"META",
        meta_section(
            vec![
                ("window", m.window.to_string()),
                ("window_over", m.window_over.to_string()),
                ("corpus_tokens", m.corpus_tokens.to_string()),
                ("scheme", m.scheme.to_string()),
                ("log_base", "e".to_string()),
            ],
            &m.provenance,
        ),
    );
    w.section(b"VOCB", vocab_section(&m.vocab));
    w.section(b"LAYT", layout_section(&m.rows, &m.cols));
    w.section(b"CSRM", csr_section(&m.values, |b, v| b.write_f64::<LE>(v).unwrap()));
    w.finish(path)
}

pub fn save_dense(m: &DenseModel, path: &Path) -> Result<()> {
    let mut w = FileWriter::new(Kind::Dense);
    w.section(
        b"META",
        meta_section(
            vec![
                ("k", m.k().to_string()),
                ("eigen_weight", m.eigen_weight().to_string()),
                ("seed", m.seed().to_string()),
                ("scheme", m.scheme().to_string()),
            ],
            &m.provenance,
        ),
    );
    w.section(b"VOCB", vocab_section(m.vocab()));
    w.section(b"LAYT", layout_section(m.rows(), &[]));
    let mut sv = Vec::new();
    sv.write_u32::<LE>(m.k() as u32).unwrap();
    m.singular_values().iter().for_each(|&s| sv.write_f64::<LE>(s).unwrap());
    w.section(b"SVAL", sv);
    let mut vecs = Vec::with_capacity(8 + 8 * m.vectors_flat().len());
    vecs.write_u32::<LE>(m.rows().len() as u32).unwrap();
    vecs.write_u32::<LE>(m.k() as u32).unwrap();
    m.vectors_flat().iter().for_each(|&v| vecs.write_f64::<LE>(v).unwrap());
    w.section(b"VECS", vecs);
    w.finish(path)
}

// ---------------------------------------------------------------- reading

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
    /// File offset of `buf[0]`.
    base: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Format {
            offset: (self.base + self.pos) as u64,
            message: msg.into(),
        })
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return self.err(format!(
                "truncated while reading {what}: need {n} bytes, {} left",
                self.buf.len() - self.pos
            ));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn len_checked(&mut self, n: u64, elem: usize, what: &str) -> Result<usize> {
        let left = (self.buf.len() - self.pos) as u64;
        if n.saturating_mul(elem as u64) > left {
            return self.err(format!("{what}: {n} elements declared but only {left} bytes left"));
        }
        Ok(n as usize)
    }

    fn u32s(&mut self, n: u64, what: &str) -> Result<Vec<u32>> {
        let n = self.len_checked(n, 4, what)?;
        let bytes = self.take(4 * n, what)?;
        Ok(bytes.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn u64s(&mut self, n: u64, what: &str) -> Result<Vec<u64>> {
        let n = self.len_checked(n, 8, what)?;
        let bytes = self.take(8 * n, what)?;
        Ok(bytes.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn f64s(&mut self, n: u64, what: &str) -> Result<Vec<f64>> {
        Ok(self.u64s(n, what)?.into_iter().map(f64::from_bits).collect())
    }

    fn string(&mut self, what: &str) -> Result<String> {
        let n = self.u32(what)? as u64;
        let n = self.len_checked(n, 1, what)?;
        let at = self.pos;
        let bytes = self.take(n, what)?;
        match std::str::from_utf8(bytes) {
            Ok(s) => Ok(s.to_string()),
            Err(_) => Err(Error::Format {
                offset: (self.base + at) as u64,
                message: format!("{what} is not valid UTF-8"),
            }),
        }
    }

    fn done(&self, what: &str) -> Result<()> {
        if self.pos != self.buf.len() {
            return self.err(format!("{} trailing bytes in {what} section", self.buf.len() - self.pos));
        }
        Ok(())
    }
}

struct FileReader<'a> {
    cur: Cursor<'a>,
    kind: Kind,
}

impl<'a> FileReader<'a> {
    fn open(bytes: &'a [u8]) -> Result<Self> {
        let mut cur = Cursor {
            buf: bytes,
            pos: 0,
            base: 0,
        };
        let magic = cur.take(8, "magic")?;
        if magic != MAGIC {
            return Err(Error::Format {
                offset: 0,
                message: "not a model file (bad magic bytes)".into(),
            });
        }
        let version = cur.u16("version")?;
        if version != VERSION {
            return cur.err(format!("unsupported format version {version}"));
        }
        let kind_byte = cur.u8("kind")?;
        let kind = match Kind::from_byte(kind_byte) {
            Some(k) => k,
            None => return cur.err(format!("unknown model kind {kind_byte}")),
        };
        cur.u8("reserved")?;
        Ok(FileReader { cur, kind })
    }

    fn section(&mut self, tag: &[u8; 4]) -> Result<Cursor<'a>> {
        let at = self.cur.pos;
        let got = self.cur.take(4, "section tag")?;
        if got != tag {
            return Err(Error::Format {
                offset: at as u64,
                message: format!(
                    "expected section {:?}, found {:?}",
                    String::from_utf8_lossy(tag),
                    String::from_utf8_lossy(got)
                ),
            });
        }
        let len = self.cur.u64("section length")?;
        let len = self.cur.len_checked(len, 1, "section payload")?;
        let base = self.cur.base + self.cur.pos;
        let payload = self.cur.take(len, "section payload")?;
        Ok(Cursor {
            buf: payload,
            pos: 0,
            base,
        })
    }

    fn end(mut self) -> Result<()> {
        let c = self.section(b"END\0")?;
        c.done("END")?;
        if self.cur.pos != self.cur.buf.len() {
            return self.cur.err("data after END section");
        }
        Ok(())
    }
}

struct Meta {
    map: BTreeMap<String, String>,
    offset: u64,
}

impl Meta {
    fn read(mut c: Cursor<'_>) -> Result<Self> {
        let offset = c.base as u64;
        let n = c.u32("meta count")?;
        let mut map = BTreeMap::new();
        for _ in 0..n {
            let k = c.string("meta key")?;
            let v = c.string("meta value")?;
            map.insert(k, v);
        }
        c.done("META")?;
        Ok(Meta { map, offset })
    }

    fn typed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let raw = self.map.remove(key).ok_or_else(|| Error::Format {
            offset: self.offset,
            message: format!("META lacks required key {key:?}"),
        })?;
        raw.parse().map_err(|_| Error::Format {
            offset: self.offset,
            message: format!("META key {key:?} has invalid value {raw:?}"),
        })
    }

    fn provenance(self) -> BTreeMap<String, String> {
        self.map
    }
}

fn read_vocab(mut c: Cursor<'_>) -> Result<Vocabulary> {
    let min_context_freq = c.u64("min_context_freq")?;
    let n = c.u32("vocabulary size")? as u64;
    let n = c.len_checked(n, 13, "vocabulary")?;
    let mut words = Vec::with_capacity(n);
    let mut freqs = Vec::with_capacity(n);
    for _ in 0..n {
        let lemma = c.string("lemma")?;
        let at = c.pos;
        let pos = Pos::from_byte(c.u8("pos")?).ok_or_else(|| Error::Format {
            offset: (c.base + at) as u64,
            message: "invalid POS byte".into(),
        })?;
        words.push(Word::new(lemma, pos));
        freqs.push(c.u64("frequency")?);
    }
    c.done("VOCB")?;
    let offset = c.base as u64;
    Vocabulary::from_parts(words, freqs, min_context_freq).map_err(|e| Error::Format {
        offset,
        message: e.to_string(),
    })
}

fn read_layout(mut c: Cursor<'_>, vocab_len: usize) -> Result<(Vec<WordId>, Vec<WordId>)> {
    let nr = c.u32("row count")?;
    let rows = c.u32s(nr as u64, "row ids")?;
    let nc = c.u32("column count")?;
    let cols = c.u32s(nc as u64, "column ids")?;
    c.done("LAYT")?;
    for ids in [&rows, &cols] {
        if ids.windows(2).any(|w| w[0] >= w[1]) || ids.iter().any(|&i| i as usize >= vocab_len) {
            return Err(Error::Format {
                offset: c.base as u64,
                message: "layout ids are not ascending vocabulary ids".into(),
            });
        }
    }
    Ok((rows, cols))
}

fn read_csr<T: Copy>(
    mut c: Cursor<'_>,
    n_rows: usize,
    n_cols: usize,
    values: impl FnOnce(&mut Cursor<'_>, u64) -> Result<Vec<T>>,
) -> Result<Csr<T>> {
    let nnz = c.u64("nnz")?;
    let indptr: Vec<usize> = c
        .u64s(n_rows as u64 + 1, "row pointers")?
        .into_iter()
        .map(|p| p as usize)
        .collect();
    let indices = c.u32s(nnz, "column indices")?;
    let vals = values(&mut c, nnz)?;
    c.done("CSRM")?;
    Csr::from_raw_parts(n_rows, n_cols, indptr, indices, vals).map_err(|m| Error::Format {
        offset: c.base as u64,
        message: m,
    })
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn decode(bytes: &[u8]) -> Result<AnyModel> {
    let mut r = FileReader::open(bytes)?;
    let mut meta = Meta::read(r.section(b"META")?)?;
    let vocab = read_vocab(r.section(b"VOCB")?)?;
    let layout_cur = r.section(b"LAYT")?;
    let layout_offset = layout_cur.base as u64;
    let (rows, cols) = read_layout(layout_cur, vocab.len())?;
    let model = match r.kind {
        Kind::Counts => {
            let window = meta.typed("window")?;
            let window_over: WindowOver = meta.typed("window_over")?;
            let corpus_tokens = meta.typed("corpus_tokens")?;
            let counts = read_csr(r.section(b"CSRM")?, rows.len(), cols.len(), |c, n| c.u64s(n, "counts"))?;
            let mut mc = r.section(b"MARG")?;
            let total = mc.u64("total")?;
            let row_marginals = mc.u64s(rows.len() as u64, "row marginals")?;
            let col_marginals = mc.u64s(cols.len() as u64, "column marginals")?;
            mc.done("MARG")?;
            let m = CooccurrenceMatrix {
                vocab,
                rows,
                cols,
                counts,
                row_marginals,
                col_marginals,
                total,
                window,
                window_over,
                corpus_tokens,
                provenance: meta.provenance(),
            };
            m.check_consistency().map_err(|message| Error::Format {
                offset: mc.base as u64,
                message,
            })?;
            AnyModel::Counts(m)
        }
        Kind::Weighted => {
            let window = meta.typed("window")?;
            let window_over = meta.typed("window_over")?;
            let corpus_tokens = meta.typed("corpus_tokens")?;
            let scheme_raw: String = meta.typed("scheme")?;
            let scheme: Scheme = scheme_raw.parse().map_err(|_| Error::Format {
                offset: meta.offset,
                message: format!("unknown scheme {scheme_raw:?}"),
            })?;
            let _base: String = meta.typed("log_base")?;
            let values = read_csr(r.section(b"CSRM")?, rows.len(), cols.len(), |c, n| c.f64s(n, "weights"))?;
            AnyModel::Weighted(WeightedMatrix {
                vocab,
                rows,
                cols,
                values,
                scheme,
                window,
                window_over,
                corpus_tokens,
                provenance: meta.provenance(),
            })
        }
        Kind::Dense => {
            if !cols.is_empty() {
                return Err(Error::Format {
                    offset: layout_offset,
                    message: "dense model layout must not list columns".into(),
                });
            }
            let k: usize = meta.typed("k")?;
            let p: EigenWeight = meta.typed("eigen_weight")?;
            let seed: u64 = meta.typed("seed")?;
            let scheme_raw: String = meta.typed("scheme")?;
            let scheme: Scheme = scheme_raw.parse().map_err(|_| Error::Format {
                offset: meta.offset,
                message: format!("unknown scheme {scheme_raw:?}"),
            })?;
            let mut sc = r.section(b"SVAL")?;
            let ks = sc.u32("k")? as usize;
            if ks != k {
                return sc.err(format!("SVAL holds {ks} values but META declares k = {k}"));
            }
            let singular = sc.f64s(k as u64, "singular values")?;
            sc.done("SVAL")?;
            let mut vc = r.section(b"VECS")?;
            let n = vc.u32("vector rows")? as usize;
            let kk = vc.u32("vector width")? as usize;
            if n != rows.len() || kk != k {
                return vc.err(format!("vector block is {n}×{kk}, expected {}×{k}", rows.len()));
            }
            let vectors = vc.f64s((n * k) as u64, "vectors")?;
            vc.done("VECS")?;
            let mut d = DenseModel::from_parts(vocab, rows, vectors, singular, p, seed, scheme);
            d.provenance = meta.provenance();
            AnyModel::Dense(d)
        }
    };
    r.end()?;
    Ok(model)
}

pub fn load_any(path: &Path) -> Result<AnyModel> {
    decode(&read_file(path)?)
}

fn wrong_kind(path: &Path, want: &str, got: &AnyModel) -> Error {
    let got = match got {
        AnyModel::Counts(_) => "count",
        AnyModel::Weighted(_) => "weighted",
        AnyModel::Dense(_) => "dense",
    };
    Error::config(format!("{}: expected a {want} model, found a {got} model", path.display()))
}

pub fn load_counts(path: &Path) -> Result<CooccurrenceMatrix> {
    match load_any(path)? {
        AnyModel::Counts(m) => Ok(m),
        other => Err(wrong_kind(path, "count", &other)),
    }
}

pub fn load_weighted(path: &Path) -> Result<WeightedMatrix> {
    match load_any(path)? {
        AnyModel::Weighted(m) => Ok(m),
        other => Err(wrong_kind(path, "weighted", &other)),
    }
}

pub fn load_dense(path: &Path) -> Result<DenseModel> {
    match load_any(path)? {
        AnyModel::Dense(m) => Ok(m),
        other => Err(wrong_kind(path, "dense", &other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cooccur::{build_vocab, count_cooccurrences, CountOptions};
    use crate::corpus::{Sentence, Token};

    fn sample() -> CooccurrenceMatrix {
        let sents: Vec<Sentence> = ["a b c", "b c d a", "c a"]
            .iter()
            .map(|l| l.split(' ').map(|w| Token::new(w, Pos::N)).collect())
            .collect();
        let vocab = build_vocab(sents.clone(), 1);
        let mut m = count_cooccurrences(sents, vocab, &CountOptions::new(2), None).unwrap();
        m.provenance.insert("fingerprint".into(), "abc123".into());
        m
    }

    #[test]
    fn counts_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.dsm");
        let m = sample();
        save_counts(&m, &p).unwrap();
        assert_eq!(load_counts(&p).unwrap(), m);
        assert!(load_weighted(&p).is_err());
    }

    #[test]
    fn empty_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.dsm");
        let m = count_cooccurrences(Vec::new(), Vocabulary::default(), &CountOptions::new(2), None).unwrap();
        save_counts(&m, &p).unwrap();
        assert_eq!(load_counts(&p).unwrap(), m);
    }

    #[test]
    fn weighted_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.dsm");
        let w = crate::weighting::apply_lmi(&sample());
        save_weighted(&w, &p).unwrap();
        assert_eq!(load_weighted(&p).unwrap(), w);
    }

    #[test]
    fn truncation_reports_offset() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.dsm");
        save_counts(&sample(), &p).unwrap();
        let bytes = fs::read(&p).unwrap();
        for cut in [0, 5, 12, 40, bytes.len() / 2, bytes.len() - 1] {
            match decode(&bytes[..cut]) {
                Err(Error::Format { offset, .. }) => assert!(offset as usize <= cut),
                other => panic!("cut at {cut}: expected format error, got {other:?}"),
            }
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode(&bad), Err(Error::Format { offset: 0, .. })));
        let mut extra = bytes;
        extra.push(0);
        assert!(matches!(decode(&extra), Err(Error::Format { .. })));
    }

    #[test]
    fn corrupted_marginal_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.dsm");
        let m = sample();
        save_counts(&m, &p).unwrap();
        let mut bytes = fs::read(&p).unwrap();
        // last 8 bytes before END (4 tag + 8 len) belong to the final column marginal
        let at = bytes.len() - 12 - 8;
        bytes[at] ^= 0x01;
        assert!(matches!(decode(&bytes), Err(Error::Format { .. })));
    }

    #[test]
    fn reserved_provenance_keys_cannot_shadow_fields() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.dsm");
        let mut m = sample();
        m.provenance.insert("window".into(), "99".into());
        save_counts(&m, &p).unwrap();
        let back = load_counts(&p).unwrap();
        assert_eq!(back.window(), 2);
        assert!(!back.provenance.contains_key("window"));
    }
}
