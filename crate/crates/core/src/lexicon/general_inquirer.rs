//! General Inquirer spreadsheet exports.
//!
//! Entries look like `FUN#1`, `FUN#2`, one row per sense, with the sense's
//! share of usage written as e.g. `| 97% noun-adj: ...` in the definition
//! column. A word whose senses disagree takes the label of its most used
//! sense; equal shares resolve to positive.

use std::collections::HashMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::sync::OnceLock;

use log::{info, warn};
use regex::Regex;

use super::{delimiter_byte, Builder, FormatSpec, LexiconEntry, LexiconKind, ParserSpec, SentimentLexicon};
use crate::error::{Error, Result};

/// First `NN%` figure in a definition field.
pub fn usage_percent(text: &str) -> Option<f64> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"(\d+(?:\.\d+)?)\s*%").expect("static regex"));
    re.captures(text)
        .and_then(|c| c[1].parse::<f64>().ok())
        .filter(|p| (0.0..=100.0).contains(p))
}

/// Split `ABOUT#2` into (`about`, Some("2")); stray `>` markers are dropped.
fn split_entry(entry: &str) -> (String, Option<String>) {
    let (head, tag) = match entry.split_once('#') {
        Some((h, t)) => (h, Some(t.to_string())),
        None => (entry, None),
    };
    (head.trim().trim_end_matches('>').to_lowercase(), tag)
}

#[derive(Debug)]
struct Sense {
    score: f64,
    tag: Option<String>,
    usage: Option<f64>,
    line: usize,
}

pub(super) fn parse_with_spec(spec: &FormatSpec, data: &Path) -> Result<SentimentLexicon> {
    let f = File::open(data).map_err(|e| Error::io(data, e))?;
    parse_general_inquirer(f, spec)
}

/// The Harvard IV-4 Positiv/Negativ lexicon from a spreadsheet export; the
/// delimiter (tab or comma) is taken from the header line.
pub fn parse_hgi(path: impl AsRef<Path>) -> Result<SentimentLexicon> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    let header = text.lines().next().unwrap_or_default();
    let delimiter = if header.contains('\t') { "\t" } else { "," };
    let spec = FormatSpec {
        name: "hgi".into(),
        description: String::new(),
        source: String::new(),
        kind: LexiconKind::Binary,
        data: String::new(),
        parser: ParserSpec::GeneralInquirer {
            delimiter: delimiter.into(),
            entry_column: "Entry".into(),
            positive_column: "Positiv".into(),
            negative_column: "Negativ".into(),
            sense_column: Some("Defined".into()),
        },
    };
    parse_general_inquirer(text.as_bytes(), &spec)
}

pub fn parse_general_inquirer<R: Read>(reader: R, spec: &FormatSpec) -> Result<SentimentLexicon> {
    let ParserSpec::GeneralInquirer {
        delimiter,
        entry_column,
        positive_column,
        negative_column,
        sense_column,
    } = &spec.parser
    else {
        return Err(Error::InvalidArgument(format!(
            "lexicon '{}' is not a General Inquirer lexicon",
            spec.name
        )));
    };
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter_byte(delimiter)?)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse(format!("{}: {e}", spec.name)))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Parse(format!("{}: missing column '{name}'", spec.name)))
    };
    let (ci, cp, cn) = (col(entry_column)?, col(positive_column)?, col(negative_column)?);
    let cs = sense_column.as_deref().map(col).transpose()?;

    let mut order: Vec<String> = Vec::new();
    let mut senses: HashMap<String, Vec<Sense>> = HashMap::new();
    let mut annotations = 0usize;
    let mut both = 0usize;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(format!("{}: {e}", spec.name)))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| rec.get(i).map(str::trim).unwrap_or("");
        let (pos, neg) = (!field(cp).is_empty(), !field(cn).is_empty());
        let score = match (pos, neg) {
            (true, false) => 1.0,
            (false, true) => -1.0,
            (false, false) => continue,
            (true, true) => {
                warn!(
                    "{}: line {line}: '{}' is marked both positive and negative; skipped",
                    spec.name,
                    field(ci)
                );
                both += 1;
                continue;
            }
        };
        let (word, tag) = split_entry(field(ci));
        if word.is_empty() {
            return Err(Error::ParseAtLine {
                line,
                message: "empty entry".into(),
            });
        }
        annotations += 1;
        let usage = cs.and_then(|c| usage_percent(field(c)));
        let list = senses.entry(word.clone()).or_default();
        if list.is_empty() {
            order.push(word);
        }
        list.push(Sense {
            score,
            tag,
            usage,
            line,
        });
    }

    let mut b = Builder::new(spec.name.clone(), spec.kind);
    let (mut resolved, mut fallbacks) = (0usize, 0usize);
    for word in order {
        let list = &senses[&word];
        let agree = list.iter().all(|s| s.score == list[0].score);
        let chosen = if agree {
            best_by_usage(list).unwrap_or(&list[0])
        } else {
            resolved += 1;
            match best_by_usage(list) {
                Some(best) => {
                    let top = best.usage;
                    let tied: Vec<&Sense> = list.iter().filter(|s| s.usage == top).collect();
                    if tied.iter().any(|s| s.score != best.score) {
                        info!(
                            "{}: '{word}' has senses tied at {}% usage; keeping the positive one",
                            spec.name,
                            top.unwrap_or(0.0)
                        );
                        tied.into_iter().find(|s| s.score > 0.0).unwrap_or(best)
                    } else {
                        best
                    }
                }
                None => {
                    fallbacks += 1;
                    warn!(
                        "{}: '{word}' has conflicting senses without usage percentages; \
                         using the first listed sense",
                        spec.name
                    );
                    &list[0]
                }
            }
        };
        b.add_entry(
            LexiconEntry {
                word: word.clone(),
                score: chosen.score,
                sense_tag: chosen.tag.clone(),
                usage_percent: chosen.usage,
            },
            chosen.line,
        )?;
    }
    let mut lex = b.finish();
    lex.stats.raw_annotations = annotations;
    lex.stats.sense_resolved = resolved;
    lex.stats.sense_fallbacks = fallbacks;
    lex.stats.rejected += both;
    Ok(lex)
}

/// Sense with the largest parsable usage share; the first one wins ties.
fn best_by_usage(list: &[Sense]) -> Option<&Sense> {
    let mut best: Option<&Sense> = None;
    for s in list {
        if let Some(u) = s.usage {
            if best.is_none_or(|b| u > b.usage.unwrap_or(f64::NEG_INFINITY)) {
                best = Some(s);
            }
        }
    }
    best
}
