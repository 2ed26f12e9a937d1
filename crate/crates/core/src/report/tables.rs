use super::{csv_string, fmt_num, fmt_opt};
use crate::antonym::AlignmentRanking;
use crate::error::Result;
use crate::evaluation::{AnalogyResult, SimilarityResult};
use crate::lexicon::{LexiconUnion, SentimentLexicon};
use crate::screening::{BiasMatrix, BiasResult, CellStatus, EnsembleSummary, ExcisionReport, GroundTruthResult};

pub const BIAS_HEADER: [&str; 17] = [
    "model",
    "axis",
    "lexicon",
    "status",
    "reason",
    "r",
    "n",
    "p_raw",
    "p_adjusted",
    "flags",
    "method",
    "family_size",
    "coverage",
    "n_projected",
    "lexicon_size",
    "pole1_coverage",
    "pole2_coverage",
];

fn bias_row(c: &BiasResult, m: &BiasMatrix, alpha: f64) -> Vec<String> {
    let (status, reason) = match c.status {
        CellStatus::Ok => ("ok", String::new()),
        CellStatus::Skipped(r) => ("skipped", r.to_string()),
        CellStatus::Undefined(r) => ("undefined", r.to_string()),
    };
    vec![
        c.model.clone(),
        c.axis.clone(),
        c.lexicon.clone(),
        status.into(),
        reason,
        fmt_opt(c.r()),
        c.correlation.as_ref().map(|r| r.n.to_string()).unwrap_or_default(),
        fmt_opt(c.correlation.as_ref().map(|r| r.p_raw)),
        fmt_opt(c.p_adjusted),
        c.flags(alpha),
        m.method.to_string(),
        m.family_size.to_string(),
        fmt_num(c.coverage),
        c.n_projected.to_string(),
        c.lexicon_size.to_string(),
        fmt_opt(c.pole1_coverage),
        fmt_opt(c.pole2_coverage),
    ]
}

/// One row per cell, model-major.
pub fn bias_matrix_csv(m: &BiasMatrix, alpha: f64) -> Result<String> {
    csv_string(&BIAS_HEADER, m.cells.iter().map(|c| bias_row(c, m, alpha)))
}

/// Cells of several matrices in one table.
pub fn bias_matrices_csv(ms: &[BiasMatrix], alpha: f64) -> Result<String> {
    csv_string(
        &BIAS_HEADER,
        ms.iter()
            .flat_map(|m| m.cells.iter().map(move |c| bias_row(c, m, alpha))),
    )
}

pub fn excision_summary_csv(r: &ExcisionReport) -> Result<String> {
    csv_string(
        &[
            "axis",
            "lexicon",
            "fraction",
            "repetitions",
            "mean_correlation",
            "mean_delta",
            "sign_agreement",
            "defined",
            "undefined",
        ],
        r.rows.iter().map(|row| {
            vec![
                r.axis.clone(),
                r.lexicon.clone(),
                fmt_num(row.fraction),
                row.repetitions.to_string(),
                fmt_opt(row.mean_correlation),
                fmt_opt(row.mean_delta),
                fmt_opt(row.sign_agreement),
                row.defined.to_string(),
                row.undefined.to_string(),
            ]
        }),
    )
}

pub fn excision_models_csv(r: &ExcisionReport) -> Result<String> {
    csv_string(
        &["axis", "lexicon", "fraction", "model", "baseline_r", "mean_r"],
        r.rows.iter().flat_map(|row| {
            r.models.iter().enumerate().map(move |(mi, model)| {
                vec![
                    r.axis.clone(),
                    r.lexicon.clone(),
                    fmt_num(row.fraction),
                    model.clone(),
                    fmt_opt(r.baseline[mi]),
                    fmt_opt(row.model_means[mi]),
                ]
            })
        }),
    )
}

pub fn ensemble_axis_csv(s: &EnsembleSummary) -> Result<String> {
    csv_string(
        &["axis", "lexicon", "mean_r", "models_defined"],
        s.axis_table.iter().map(|a| {
            vec![
                a.axis.clone(),
                a.lexicon.clone(),
                fmt_opt(a.mean_r),
                a.models_defined.to_string(),
            ]
        }),
    )
}

/// Square agreement matrix with row labels in the first column.
pub fn agreement_csv(labels: &[String], m: &[Vec<Option<f64>>]) -> Result<String> {
    let mut header = vec![""];
    header.extend(labels.iter().map(String::as_str));
    csv_string(
        &header,
        labels.iter().zip(m).map(|(l, row)| {
            std::iter::once(l.clone())
                .chain(row.iter().map(|v| fmt_opt(*v)))
                .collect::<Vec<_>>()
        }),
    )
}

pub fn alignment_csv(r: &AlignmentRanking) -> Result<String> {
    let label = |p: Option<crate::lexicon::Polarity>| p.map(|p| p.as_str().to_string()).unwrap_or_default();
    csv_string(
        &["rank", "word1", "word2", "cosine", "label1", "label2"],
        r.entries.iter().enumerate().map(|(i, e)| {
            vec![
                (i + 1).to_string(),
                e.pair.word1.clone(),
                e.pair.word2.clone(),
                fmt_num(e.cosine),
                label(e.label1),
                label(e.label2),
            ]
        }),
    )
}

pub fn ground_truth_csv(r: &GroundTruthResult) -> Result<String> {
    csv_string(
        &["word", "projection", "value"],
        r.points
            .iter()
            .map(|p| vec![p.word.clone(), fmt_num(p.projection), fmt_num(p.value)]),
    )
}

pub const EVAL_HEADER: [&str; 9] = [
    "model", "dataset", "task", "metric", "value", "n", "total", "coverage", "skipped",
];

pub fn similarity_row(r: &SimilarityResult) -> Vec<String> {
    vec![
        r.model.clone(),
        r.dataset.clone(),
        "similarity".into(),
        "spearman".into(),
        fmt_num(r.spearman),
        r.n.to_string(),
        r.total.to_string(),
        fmt_num(r.coverage),
        (r.total - r.n).to_string(),
    ]
}

pub fn analogy_row(r: &AnalogyResult) -> Vec<String> {
    let total = r.attempted + r.skipped;
    vec![
        r.model.clone(),
        r.dataset.clone(),
        "analogy".into(),
        if r.strict { "accuracy_strict" } else { "accuracy" }.into(),
        fmt_num(r.accuracy),
        r.attempted.to_string(),
        total.to_string(),
        fmt_num(r.attempted as f64 / total as f64),
        r.skipped.to_string(),
    ]
}

pub fn lexicon_stats_csv(lexicons: &[SentimentLexicon]) -> Result<String> {
    csv_string(
        &[
            "lexicon",
            "kind",
            "entries",
            "positive",
            "negative",
            "raw_annotations",
            "sense_resolved",
            "sense_fallbacks",
            "filtered",
            "rejected",
            "conflicts_dropped",
            "multiword",
        ],
        lexicons.iter().map(|l| {
            let s = &l.stats;
            vec![
                l.name.clone(),
                format!("{:?}", l.kind).to_lowercase(),
                l.len().to_string(),
                l.positives().to_string(),
                l.negatives().to_string(),
                s.raw_annotations.to_string(),
                s.sense_resolved.to_string(),
                s.sense_fallbacks.to_string(),
                s.filtered.to_string(),
                s.rejected.to_string(),
                s.conflicts_dropped.to_string(),
                s.multiword.to_string(),
            ]
        }),
    )
}

/// Union words with their vote counts and majority label.
pub fn union_csv(u: &LexiconUnion) -> Result<String> {
    csv_string(
        &["word", "positive_votes", "negative_votes", "majority"],
        u.entries.iter().map(|e| {
            vec![
                e.word.clone(),
                e.positive_votes.to_string(),
                e.negative_votes.to_string(),
                e.majority()
                    .map(|p| p.as_str().to_string())
                    .unwrap_or_else(|| "tie".into()),
            ]
        }),
    )
}
