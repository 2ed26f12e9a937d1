//! Binary cache for fast reloads.
//!
//! Layout (all integers little-endian): magic `AXPR`, u16 version, u32 dim,
//! u64 vocab size, then per word a u32 byte length and UTF-8 bytes, then the
//! row-major f32 block.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{name_from_path, EmbeddingModel, SourceFormat, UNIT_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg;

pub const CACHE_MAGIC: &[u8; 4] = b"AXPR";
pub const CACHE_VERSION: u16 = 1;

pub fn write_cache<W: Write>(model: &EmbeddingModel, writer: W) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&CACHE_VERSION.to_le_bytes())?;
    w.write_all(&(model.dim() as u32).to_le_bytes())?;
    w.write_all(&(model.vocab_size() as u64).to_le_bytes())?;
    for word in model.words() {
        w.write_all(&(word.len() as u32).to_le_bytes())?;
        w.write_all(word.as_bytes())?;
    }
    for x in model.vectors() {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()
}

struct Reader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Reader<R> {
    fn take<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.fill(&mut buf, what)?;
        Ok(buf)
    }

    fn fill(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        let mut filled = 0;
        while filled < buf.len() {
            match self.inner.read(&mut buf[filled..]) {
                Ok(0) => {
                    return Err(Error::ParseAtByte {
                        offset: self.offset + filled as u64,
                        message: format!("cache truncated in {what}"),
                    })
                }
                Ok(n) => filled += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => {
                    return Err(Error::ParseAtByte {
                        offset: self.offset + filled as u64,
                        message: e.to_string(),
                    })
                }
            }
        }
        self.offset += buf.len() as u64;
        Ok(())
    }
}

pub fn read_cache_from<R: Read>(reader: R, name: &str) -> Result<EmbeddingModel> {
    let mut r = Reader {
        inner: reader,
        offset: 0,
    };
    let magic: [u8; 4] = r.take("magic")?;
    if &magic != CACHE_MAGIC {
        return Err(Error::Cache(format!("bad magic bytes {magic:02x?}")));
    }
    let version = u16::from_le_bytes(r.take("version")?);
    if version != CACHE_VERSION {
        return Err(Error::Cache(format!(
            "unsupported cache version {version} (expected {CACHE_VERSION})"
        )));
    }
    let dim = u32::from_le_bytes(r.take("dim")?) as usize;
    let vocab = u64::from_le_bytes(r.take("vocab size")?);
    if dim == 0 {
        return Err(Error::Cache("dimension is zero".into()));
    }
    let vocab = usize::try_from(vocab).map_err(|_| Error::Cache("vocab size too large".into()))?;

    let mut words = Vec::with_capacity(vocab.min(1 << 24));
    for _ in 0..vocab {
        let len = u32::from_le_bytes(r.take("word length")?) as usize;
        let start = r.offset;
        let mut bytes = vec![0u8; len.min(1 << 16)];
        if len > bytes.len() {
            return Err(Error::ParseAtByte {
                offset: start,
                message: format!("implausible word length {len}"),
            });
        }
        r.fill(&mut bytes, "word")?;
        let word = String::from_utf8(bytes).map_err(|_| Error::ParseAtByte {
            offset: start,
            message: "word is not valid UTF-8".into(),
        })?;
        words.push(word);
    }

    let mut vectors = Vec::with_capacity(vocab.saturating_mul(dim).min(1 << 28));
    let mut raw = vec![0u8; dim * 4];
    let mut row = vec![0f32; dim];
    for word in &words {
        let start = r.offset;
        r.fill(&mut raw, "vectors")?;
        for (x, c) in row.iter_mut().zip(raw.chunks_exact(4)) {
            *x = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
        }
        let norm = linalg::norm_f32(&row);
        if !(norm - 1.0).abs().le(&UNIT_TOLERANCE) {
            return Err(Error::Cache(format!(
                "row for '{word}' at byte {start} is not unit length (norm {norm})"
            )));
        }
        vectors.extend_from_slice(&row);
    }
    let mut probe = [0u8; 1];
    if matches!(r.inner.read(&mut probe), Ok(n) if n > 0) {
        return Err(Error::ParseAtByte {
            offset: r.offset,
            message: "trailing data after vector block".into(),
        });
    }
    EmbeddingModel::from_normalized(name.to_string(), dim, words, vectors, SourceFormat::Cache).map_err(|e| match e {
        Error::Parse(m) => Error::Cache(m),
        other => other,
    })
}

pub fn read_cache(path: impl AsRef<Path>) -> Result<EmbeddingModel> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_cache_from(BufReader::with_capacity(1 << 20, f), &name_from_path(path))
}

impl EmbeddingModel {
    pub fn write_cache_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        write_cache(self, f).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> EmbeddingModel {
        EmbeddingModel::from_rows("toy", 2, vec!["ab".into(), "ü".into()], vec![1.0, 2.0, -3.0, 0.5]).unwrap()
    }

    #[test]
    fn round_trip_bits() {
        let m = toy();
        let mut bytes = Vec::new();
        write_cache(&m, &mut bytes).unwrap();
        let back = read_cache_from(&bytes[..], "toy").unwrap();
        assert_eq!(back.words(), m.words());
        let a: Vec<u32> = m.vectors().iter().map(|x| x.to_bits()).collect();
        let b: Vec<u32> = back.vectors().iter().map(|x| x.to_bits()).collect();
        assert_eq!(a, b);
        assert_eq!(back.source_format(), SourceFormat::Cache);
    }

    #[test]
    fn corrupted_magic() {
        let mut bytes = Vec::new();
        write_cache(&toy(), &mut bytes).unwrap();
        bytes[0] = b'X';
        assert!(matches!(read_cache_from(&bytes[..], "t"), Err(Error::Cache(_))));
    }

    #[test]
    fn version_mismatch() {
        let mut bytes = Vec::new();
        write_cache(&toy(), &mut bytes).unwrap();
        bytes[4] = 9;
        assert!(matches!(read_cache_from(&bytes[..], "t"), Err(Error::Cache(_))));
    }

    #[test]
    fn restricted_view_writes_only_visible_rows() {
        let m = toy().restrict_top_k(1).unwrap();
        let mut bytes = Vec::new();
        write_cache(&m, &mut bytes).unwrap();
        let back = read_cache_from(&bytes[..], "t").unwrap();
        assert_eq!(back.vocab_size(), 1);
    }
}
