//! Reader and writer for the word2vec binary format.
//!
//! Layout: ASCII `"<vocab_size> <dim>\n"`, then per entry the word bytes
//! terminated by a single space, `dim` little-endian f32 values and an
//! optional `\n`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{name_from_path, normalize_row, EmbeddingModel, SourceFormat};
use crate::error::{Error, Result};

struct Cursor<R> {
    inner: R,
    offset: u64,
}

impl<R: BufRead> Cursor<R> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::ParseAtByte {
            offset: self.offset,
            message: message.into(),
        }
    }

    fn peek(&mut self) -> Result<Option<u8>> {
        let offset = self.offset;
        match self.inner.fill_buf() {
            Ok(buf) => Ok(buf.first().copied()),
            Err(e) => Err(Error::ParseAtByte {
                offset,
                message: e.to_string(),
            }),
        }
    }

    fn next_byte(&mut self) -> Result<Option<u8>> {
        let b = self.peek()?;
        if b.is_some() {
            self.inner.consume(1);
            self.offset += 1;
        }
        Ok(b)
    }

    /// Bytes up to (not including) `delim`; the delimiter is consumed.
    fn read_until(&mut self, delim: u8, what: &str) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        loop {
            match self.next_byte()? {
                Some(b) if b == delim => return Ok(out),
                Some(b) => out.push(b),
                None => return Err(self.err(format!("unexpected end of file in {what}"))),
            }
        }
    }

    fn read_exact(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        let mut filled = 0;
        while filled < buf.len() {
            let n = self
                .inner
                .read(&mut buf[filled..])
                .map_err(|e| self.err(e.to_string()))?;
            if n == 0 {
                return Err(self.err(format!(
                    "unexpected end of file in {what} ({} of {} bytes)",
                    filled,
                    buf.len()
                )));
            }
            filled += n;
            self.offset += n as u64;
        }
        Ok(())
    }
}

fn parse_header_number(cur: &Cursor<impl BufRead>, bytes: &[u8], what: &str) -> Result<usize> {
    std::str::from_utf8(bytes)
        .ok()
        .filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| cur.err(format!("header {what} is not an integer")))
}

/// Parse a word2vec binary stream. `name` labels the model.
pub fn read_word2vec_binary<R: BufRead>(reader: R, name: &str) -> Result<EmbeddingModel> {
    let mut cur = Cursor {
        inner: reader,
        offset: 0,
    };
    let header = cur.read_until(b'\n', "header")?;
    let header_str = header.trim_ascii_end();
    let mut parts = header_str.split(|&b| b == b' ');
    let (vocab, dim) = match (parts.next(), parts.next(), parts.next()) {
        (Some(v), Some(d), None) => (
            parse_header_number(&cur, v, "vocab size")?,
            parse_header_number(&cur, d, "dimension")?,
        ),
        _ => return Err(cur.err("header must be '<vocab_size> <dim>'")),
    };
    if dim == 0 {
        return Err(cur.err("dimension must be positive"));
    }

    let mut words = Vec::with_capacity(vocab.min(1 << 24));
    let mut vectors = Vec::with_capacity(vocab.saturating_mul(dim).min(1 << 28));
    let mut raw = vec![0u8; dim * 4];
    let mut row = vec![0f32; dim];
    for _ in 0..vocab {
        let start = cur.offset;
        let word_bytes = cur.read_until(b' ', "word")?;
        if word_bytes.is_empty() {
            return Err(Error::ParseAtByte {
                offset: start,
                message: "empty word".into(),
            });
        }
        let word = String::from_utf8(word_bytes).map_err(|_| Error::ParseAtByte {
            offset: start,
            message: "word is not valid UTF-8".into(),
        })?;
        let vec_start = cur.offset;
        cur.read_exact(&mut raw, "vector")?;
        for (x, chunk) in row.iter_mut().zip(raw.chunks_exact(4)) {
            *x = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
        }
        normalize_row(&mut row).map_err(|m| Error::ParseAtByte {
            offset: vec_start,
            message: format!("vector of '{word}': {m}"),
        })?;
        if cur.peek()? == Some(b'\n') {
            cur.next_byte()?;
        }
        words.push(word);
        vectors.extend_from_slice(&row);
    }
    if cur.peek()?.is_some() {
        return Err(cur.err("trailing data after last entry"));
    }
    let word_count = words.len();
    EmbeddingModel::from_normalized(name.to_string(), dim, words, vectors, SourceFormat::Word2vecBinary).map_err(|e| {
        match e {
            Error::Parse(m) => Error::ParseAtByte {
                offset: cur.offset,
                message: format!("{m} among {word_count} entries"),
            },
            other => other,
        }
    })
}

pub fn load_word2vec_binary(path: impl AsRef<Path>) -> Result<EmbeddingModel> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_word2vec_binary(BufReader::with_capacity(1 << 20, f), &name_from_path(path))
}

/// Write the visible rows, each entry followed by `\n`.
pub fn write_word2vec_binary<W: Write>(model: &EmbeddingModel, writer: W) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "{} {}", model.vocab_size(), model.dim())?;
    for (i, word) in model.words().iter().enumerate() {
        w.write_all(word.as_bytes())?;
        w.write_all(b" ")?;
        for x in model.row(i) {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(entries: &[(&str, &[f32])], dim: usize, newline: bool) -> Vec<u8> {
        let mut out = format!("{} {}\n", entries.len(), dim).into_bytes();
        for (w, v) in entries {
            out.extend_from_slice(w.as_bytes());
            out.push(b' ');
            for x in *v {
                out.extend_from_slice(&x.to_le_bytes());
            }
            if newline {
                out.push(b'\n');
            }
        }
        out
    }

    #[test]
    fn single_entry_normalized() {
        let bytes = file(&[("a", &[3.0, 0.0, 0.0])], 3, true);
        let m = read_word2vec_binary(&bytes[..], "t").unwrap();
        assert_eq!(m.words(), &["a".to_string()]);
        assert_eq!(m.row(0), &[1.0, 0.0, 0.0]);
        assert_eq!(m.source_format(), SourceFormat::Word2vecBinary);
    }

    #[test]
    fn newline_after_vector_is_optional() {
        let with = file(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])], 2, true);
        let without = file(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])], 2, false);
        let m1 = read_word2vec_binary(&with[..], "t").unwrap();
        let m2 = read_word2vec_binary(&without[..], "t").unwrap();
        assert_eq!(m1.words(), m2.words());
        assert_eq!(m1.vectors(), m2.vectors());
    }

    #[test]
    fn truncation_reports_offset() {
        let bytes = file(&[("a", &[1.0, 0.0])], 2, true);
        let err = read_word2vec_binary(&bytes[..bytes.len() - 3], "t").unwrap_err();
        match err {
            Error::ParseAtByte { offset, .. } => assert_eq!(offset as usize, bytes.len() - 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nan_rejected() {
        let bytes = file(&[("a", &[f32::NAN, 0.0])], 2, true);
        assert!(read_word2vec_binary(&bytes[..], "t").unwrap_err().is_parse());
    }

    #[test]
    fn duplicate_named() {
        let bytes = file(&[("dup", &[1.0, 0.0]), ("dup", &[0.0, 1.0])], 2, true);
        let err = read_word2vec_binary(&bytes[..], "t").unwrap_err();
        assert!(err.is_parse());
        assert!(err.to_string().contains("dup"));
    }

    #[test]
    fn bad_header() {
        assert!(read_word2vec_binary(&b"x 3\n"[..], "t").unwrap_err().is_parse());
        assert!(read_word2vec_binary(&b"1 3 4\n"[..], "t").unwrap_err().is_parse());
        assert!(read_word2vec_binary(&b"1 0\n"[..], "t").unwrap_err().is_parse());
    }

    #[test]
    fn trailing_garbage_rejected() {
        let mut bytes = file(&[("a", &[1.0])], 1, true);
        bytes.extend_from_slice(b"zz");
        assert!(read_word2vec_binary(&bytes[..], "t").unwrap_err().is_parse());
    }
}
