use std::fs::File;
use std::io::Read;
use std::path::Path;

use regex::Regex;

use super::{delimiter_byte, normalize_word, Builder, FormatSpec, LexiconKind, ParserSpec, SentimentLexicon};
use crate::error::{Error, Result};

pub(super) fn parse_with_spec(spec: &FormatSpec, data: &Path) -> Result<SentimentLexicon> {
    let f = File::open(data).map_err(|e| Error::io(data, e))?;
    let mut lex = parse_delimited(f, spec)?;
    lex.name = spec.name.clone();
    Ok(lex)
}

/// Column-mapped lexicon in any single-byte delimited layout.
///
/// Scores are taken verbatim unless `score_map` is given, in which case every
/// score token must be one of its keys.
pub fn parse_delimited<R: Read>(reader: R, spec: &FormatSpec) -> Result<SentimentLexicon> {
    let ParserSpec::Delimited {
        delimiter,
        has_header,
        word_column,
        score_column,
        score_map,
        word_pattern,
    } = &spec.parser
    else {
        return Err(Error::InvalidArgument(format!(
            "lexicon '{}' is not a delimited lexicon",
            spec.name
        )));
    };
    let delim = delimiter_byte(delimiter)?;
    let pattern = word_pattern
        .as_deref()
        .map(Regex::new)
        .transpose()
        .map_err(|e| Error::Parse(format!("bad word_pattern: {e}")))?;

    // tab-separated lexicons carry raw quote characters in emoticon entries
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delim)
        .has_headers(*has_header)
        .flexible(true)
        .quoting(delim != b'\t')
        .from_reader(reader);

    let mut b = Builder::new(spec.name.clone(), spec.kind);
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(format!("{}: {e}", spec.name)))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let (Some(raw_word), Some(raw_score)) = (rec.get(*word_column), rec.get(*score_column)) else {
            return Err(Error::ParseAtLine {
                line,
                message: format!("missing column {word_column} or {score_column}"),
            });
        };
        if raw_word.trim().is_empty() {
            continue;
        }
        let (word, multi) = normalize_word(raw_word);
        if pattern.as_ref().is_some_and(|p| !p.is_match(&word)) {
            b.stats().filtered += 1;
            continue;
        }
        if multi {
            b.stats().multiword += 1;
        }
        let token = raw_score.trim();
        let score = match score_map {
            Some(map) => *map.get(token).ok_or_else(|| Error::ParseAtLine {
                line,
                message: format!("unmapped score token '{token}'"),
            })?,
            None => token.parse::<f64>().map_err(|_| Error::ParseAtLine {
                line,
                message: format!("score '{token}' is not a number"),
            })?,
        };
        b.add(&word, score, line)?;
    }
    Ok(b.finish())
}

impl FormatSpec {
    /// A two-column `word<delim>score` layout without header.
    pub fn two_column(name: &str, kind: LexiconKind, delimiter: char) -> Self {
        FormatSpec {
            name: name.to_string(),
            description: String::new(),
            source: String::new(),
            kind,
            data: String::new(),
            parser: ParserSpec::Delimited {
                delimiter: delimiter.to_string(),
                has_header: false,
                word_column: 0,
                score_column: 1,
                score_map: None,
                word_pattern: None,
            },
        }
    }
}
