//! Plain-text vectors: one `word v1 v2 ... vd` entry per line, with an
//! optional `"<vocab> <dim>"` header line (the fastText `.vec` convention).

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use log::warn;

use super::{name_from_path, normalize_row, EmbeddingModel, SourceFormat};
use crate::error::{Error, Result};

fn line_err(line: usize, message: impl Into<String>) -> Error {
    Error::ParseAtLine {
        line,
        message: message.into(),
    }
}

fn header_of(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split(' ');
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Some((a.parse().ok()?, b.parse().ok()?)),
        _ => None,
    }
}

/// Parse text vectors. `has_header = None` detects a two-integer first line.
pub fn read_text_vectors<R: BufRead>(mut reader: R, has_header: Option<bool>, name: &str) -> Result<EmbeddingModel> {
    let mut words = Vec::new();
    let mut vectors: Vec<f32> = Vec::new();
    let mut dim: Option<usize> = None;
    let mut expected_vocab: Option<usize> = None;
    let mut seen = std::collections::HashMap::new();
    let mut buf = Vec::new();
    let mut lineno = 0usize;
    let mut row = Vec::new();

    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| line_err(lineno + 1, e.to_string()))?;
        if n == 0 {
            break;
        }
        lineno += 1;
        let line = std::str::from_utf8(&buf).map_err(|_| line_err(lineno, "invalid UTF-8"))?;
        let line = line.trim_end_matches(['\n', '\r']).trim_end_matches(' ');
        if line.is_empty() {
            continue;
        }

        if lineno == 1 {
            let header = match has_header {
                Some(true) => Some(header_of(line).ok_or_else(|| line_err(1, "header must be '<vocab> <dim>'"))?),
                Some(false) => None,
                None => header_of(line),
            };
            if let Some((v, d)) = header {
                if d == 0 {
                    return Err(line_err(1, "dimension must be positive"));
                }
                expected_vocab = Some(v);
                dim = Some(d);
                words.reserve(v.min(1 << 24));
                continue;
            }
        }

        let tokens: Vec<&str> = line.split(' ').collect();
        let d = *dim.get_or_insert(tokens.len().saturating_sub(1));
        if d == 0 {
            return Err(line_err(lineno, "line has no vector values"));
        }
        if tokens.len() < d + 1 {
            return Err(line_err(
                lineno,
                format!("expected {d} values, found {}", tokens.len() - 1),
            ));
        }
        let split = tokens.len() - d;
        if split > 1 && tokens[1..split].iter().all(|t| t.parse::<f32>().is_ok()) {
            return Err(line_err(
                lineno,
                format!("expected {d} values, found {}", tokens.len() - 1),
            ));
        }
        let word = tokens[..split].join(" ");
        if split > 1 {
            warn!("line {lineno}: word '{word}' contains spaces");
        }
        if word.is_empty() {
            return Err(line_err(lineno, "empty word"));
        }

        row.clear();
        for t in &tokens[split..] {
            let x: f32 = t
                .parse()
                .map_err(|_| line_err(lineno, format!("'{t}' is not a number")))?;
            row.push(x);
        }
        normalize_row(&mut row).map_err(|m| line_err(lineno, format!("'{word}': {m}")))?;
        if let Some(first) = seen.insert(word.clone(), lineno) {
            return Err(line_err(
                lineno,
                format!("duplicate word '{word}' (first seen on line {first})"),
            ));
        }
        words.push(word);
        vectors.extend_from_slice(&row);
    }

    let dim = dim.ok_or_else(|| Error::Parse("file contains no vectors".into()))?;
    if let Some(v) = expected_vocab {
        if v != words.len() {
            return Err(line_err(
                lineno,
                format!("header declares {v} words, file has {}", words.len()),
            ));
        }
    }
    EmbeddingModel::from_normalized(name.to_string(), dim, words, vectors, SourceFormat::TextVectors)
}

pub fn load_text_vectors(path: impl AsRef<Path>, has_header: Option<bool>) -> Result<EmbeddingModel> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_text_vectors(BufReader::with_capacity(1 << 20, f), has_header, &name_from_path(path))
}
