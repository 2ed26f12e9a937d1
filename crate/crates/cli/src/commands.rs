use std::fs;
use std::path::{Path, PathBuf};

use axisprobe::antonym::{alignment_ranking, load_antonym_pairs, sentiment_filtered_alignment};
use axisprobe::axis::{build_axis, AxisSpec};
use axisprobe::evaluation::{
    analogy_eval, load_bats_dir, load_google_analogies, load_similarity, similarity_eval, AnalogyDataset,
    AnalogyMethod, AnalogyOptions, SimilarityDataset,
};
use axisprobe::lexicon::{lexicon_dirs, union_vocabulary, Polarity, SentimentLexicon};
use axisprobe::report::{self, fmt_num, slug, ScatterPoint};
use axisprobe::screening::{
    ensemble_summary, excision_experiment, ground_truth_correlation, load_targets, screen, BiasMatrix, ExcisionConfig,
    ScreenOptions,
};
use axisprobe::stats::Method;
use axisprobe::{EmbeddingModel, Error, Result};
use rayon::prelude::*;
use serde::Deserialize;

use crate::output::Outputs;
use crate::{
    AnalogyScorer, Cli, Command, CorrMethod, Global, InputFormat, LexiconAction, LexiconSource, PlotAction, ScreenArgs,
    Suite,
};

/// Runs the command; `Ok(true)` means results were written but some are
/// degenerate.
pub fn run(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    let mut out = Outputs::default();
    let name = match &cli.command {
        Command::Convert {
            input,
            format,
            header,
            top_k,
        } => return convert(input, *format, *header, *top_k, &g.out).map(|_| false),
        Command::Eval {
            model,
            suite,
            benchmarks,
            vocab_limit,
            strict,
            scorer,
            predictions,
        } => {
            let opts = AnalogyOptions {
                vocab_limit: Some(*vocab_limit),
                method: match scorer {
                    AnalogyScorer::CosAdd => AnalogyMethod::CosAdd,
                    AnalogyScorer::CosMul => AnalogyMethod::CosMul,
                },
                strict: *strict,
                fallback: g.fallback,
            };
            eval(g, model, *suite, benchmarks, &opts, *predictions, &mut out)?;
            "eval"
        }
        Command::Screen {
            screen,
            source,
            lexicon,
        } => {
            screen_cmd(g, screen, source, lexicon, &mut out)?;
            "screen"
        }
        Command::Excise {
            screen,
            source,
            lexicon,
            fractions,
            reps,
        } => {
            excise(g, screen, source, lexicon, fractions, *reps, &mut out)?;
            "excise"
        }
        Command::Ensemble {
            screen,
            source,
            lexicons,
        } => {
            ensemble(g, screen, source, lexicons, &mut out)?;
            "ensemble"
        }
        Command::Align {
            model,
            axis,
            pairs,
            lexicon,
            source,
            top_k,
            exclude,
        } => {
            align(
                g,
                model,
                axis,
                pairs,
                lexicon.as_deref(),
                source,
                *top_k,
                exclude,
                &mut out,
            )?;
            "align"
        }
        Command::Groundtruth { model, axis, targets } => {
            groundtruth(g, model, axis, targets, &mut out)?;
            "groundtruth"
        }
        Command::Lexicon {
            action: LexiconAction::Stats { source, names },
        } => {
            lexicon_stats(g, source, names, &mut out)?;
            "lexicon stats"
        }
        Command::Plot { action } => {
            match action {
                PlotAction::Scatter {
                    model,
                    axis_x,
                    axis_y,
                    source,
                    lexicons,
                } => scatter(g, model, axis_x, axis_y, source, lexicons, &mut out)?,
                PlotAction::Bars { from, alpha } => bars(from, *alpha, &mut out)?,
            }
            "plot"
        }
    };
    let degenerate = out.degenerate;
    out.commit(&g.out, name, g.seed, crate::logger::captured())?;
    Ok(degenerate)
}

fn convert(input: &Path, format: InputFormat, header: Option<bool>, top_k: Option<usize>, out: &Path) -> Result<()> {
    let model = match format {
        InputFormat::Word2vecBin => axisprobe::embedding::load_word2vec_binary(input)?,
        InputFormat::Text => axisprobe::embedding::load_text_vectors(input, header)?,
        InputFormat::Cache => axisprobe::embedding::read_cache(input)?,
        InputFormat::Auto => EmbeddingModel::load_auto(input)?,
    };
    let model = match top_k {
        Some(k) => model.restrict_top_k(k)?,
        None => model,
    };
    log::info!(
        "{}: {} words x {} dims -> {}",
        input.display(),
        model.vocab_size(),
        model.dim(),
        out.display()
    );
    // write next to the target and rename so a failed run leaves nothing behind
    let tmp = out.with_extension("partial");
    model.write_cache_file(&tmp)?;
    fs::rename(&tmp, out).map_err(|e| Error::io(out, e))
}

fn load_models(paths: &[PathBuf], out: &mut Outputs) -> Result<Vec<EmbeddingModel>> {
    for p in paths {
        out.input(p);
    }
    let models = paths
        .par_iter()
        .map(EmbeddingModel::load_auto)
        .collect::<Result<Vec<_>>>()?;
    for (i, m) in models.iter().enumerate() {
        if models[..i].iter().any(|o| o.name() == m.name()) {
            return Err(Error::InvalidArgument(format!(
                "two models are named '{}'; rename one of the files",
                m.name()
            )));
        }
    }
    Ok(models)
}

fn load_axes(paths: &[PathBuf], out: &mut Outputs) -> Result<Vec<AxisSpec>> {
    let mut axes = Vec::new();
    for p in paths {
        out.input(p);
        if p.is_dir() {
            axes.extend(AxisSpec::load_dir(p)?);
        } else {
            axes.push(AxisSpec::load(p)?);
        }
    }
    if axes.is_empty() {
        return Err(Error::InvalidArgument("no axis files found".into()));
    }
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|o| o.name == a.name) {
            return Err(Error::InvalidArgument(format!("two axes are named '{}'", a.name)));
        }
    }
    Ok(axes)
}

fn lexicon_dir(source: &LexiconSource, name: &str) -> PathBuf {
    let p = Path::new(name);
    if p.is_dir() {
        p.to_path_buf()
    } else {
        source.lexicons_root.join(name)
    }
}

fn load_lexicon(source: &LexiconSource, name: &str, out: &mut Outputs) -> Result<SentimentLexicon> {
    let dir = lexicon_dir(source, name);
    if !dir.is_dir() {
        return Err(Error::InvalidArgument(format!(
            "no lexicon folder at {}",
            dir.display()
        )));
    }
    out.input(&dir);
    SentimentLexicon::load_dir(&dir)
}

fn load_lexicons(source: &LexiconSource, names: &[String], out: &mut Outputs) -> Result<Vec<SentimentLexicon>> {
    if names.is_empty() || names.iter().any(|n| n == "all") {
        let dirs = lexicon_dirs(&source.lexicons_root)?;
        for d in &dirs {
            out.input(d);
        }
        return dirs.iter().map(SentimentLexicon::load_dir).collect();
    }
    names.iter().map(|n| load_lexicon(source, n, out)).collect()
}

fn screen_options(g: &Global, a: &ScreenArgs) -> ScreenOptions {
    ScreenOptions {
        fallback: g.fallback,
        method: match a.method {
            CorrMethod::Spearman => Method::Spearman,
            CorrMethod::Pearson => Method::Pearson,
        },
        min_pole_coverage: a.min_pole_coverage,
        shared_vocab: a.shared_vocab,
        family_size: a.family_size,
        alpha: a.alpha,
    }
}

fn warn_degenerate(m: &BiasMatrix, alpha: f64, out: &mut Outputs) {
    for c in m
        .cells
        .iter()
        .filter(|c| c.status != axisprobe::screening::CellStatus::Ok)
    {
        log::warn!("{} / {} / {}: {}", c.model, c.axis, c.lexicon, c.flags(alpha));
        out.degenerate = true;
    }
}

fn screen_cmd(g: &Global, a: &ScreenArgs, source: &LexiconSource, lexicon: &str, out: &mut Outputs) -> Result<()> {
    let lex = load_lexicon(source, lexicon, out)?;
    let models = load_models(&a.models, out)?;
    let axes = load_axes(&a.axes, out)?;
    let m = screen(&models, &axes, &lex, &screen_options(g, a))?;
    warn_degenerate(&m, a.alpha, out);
    out.family_size = Some(m.family_size);
    out.add("bias_matrix.csv", report::bias_matrix_csv(&m, a.alpha)?);
    out.add("bias_bars.svg", report::bias_bars_svg(&m, a.alpha));
    out.add_json("bias_matrix.json", g.seed, &m)
}

fn excise(
    g: &Global,
    a: &ScreenArgs,
    source: &LexiconSource,
    lexicon: &str,
    fractions: &[f64],
    reps: usize,
    out: &mut Outputs,
) -> Result<()> {
    let lex = load_lexicon(source, lexicon, out)?;
    let models = load_models(&a.models, out)?;
    let axes = load_axes(&a.axes, out)?;
    let config = ExcisionConfig {
        fractions: fractions.to_vec(),
        repetitions: reps,
        seed: g.seed,
    };
    let opts = screen_options(g, a);
    let reports = axes
        .iter()
        .map(|ax| excision_experiment(&models, ax, &lex, &config, &opts))
        .collect::<Result<Vec<_>>>()?;
    let mut summary = String::new();
    let mut per_model = String::new();
    for (i, r) in reports.iter().enumerate() {
        if r.baseline.iter().any(Option::is_none) {
            log::warn!("{}: some models have no baseline correlation", r.axis);
            out.degenerate = true;
        }
        let s = report::excision_summary_csv(r)?;
        let p = report::excision_models_csv(r)?;
        // keep one header line per file
        let skip = |t: &str| {
            if i == 0 {
                t.to_string()
            } else {
                t.split_once('\n').map(|x| x.1).unwrap_or("").to_string()
            }
        };
        summary.push_str(&skip(&s));
        per_model.push_str(&skip(&p));
    }
    out.add("excision_summary.csv", summary);
    out.add("excision_models.csv", per_model);
    out.add_json("excision.json", g.seed, &reports)
}

fn ensemble(g: &Global, a: &ScreenArgs, source: &LexiconSource, names: &[String], out: &mut Outputs) -> Result<()> {
    let lexicons = load_lexicons(source, names, out)?;
    let models = load_models(&a.models, out)?;
    let axes = load_axes(&a.axes, out)?;
    let s = ensemble_summary(&models, &axes, &lexicons, &screen_options(g, a))?;
    for m in &s.matrices {
        warn_degenerate(m, a.alpha, out);
    }
    out.family_size = s.matrices.first().map(|m| m.family_size);
    out.add("ensemble_cells.csv", report::bias_matrices_csv(&s.matrices, a.alpha)?);
    out.add("ensemble_axis.csv", report::ensemble_axis_csv(&s)?);
    out.add(
        "lexicon_agreement.csv",
        report::agreement_csv(&s.lexicons, &s.lexicon_agreement)?,
    );
    out.add(
        "model_agreement.csv",
        report::agreement_csv(&s.models, &s.model_agreement)?,
    );
    log::info!(
        "mean agreement: lexicons {}, models {}",
        report::fmt_opt(s.mean_lexicon_agreement),
        report::fmt_opt(s.mean_model_agreement)
    );
    out.add_json("ensemble.json", g.seed, &s)
}

#[allow(clippy::too_many_arguments)]
fn align(
    g: &Global,
    model: &Path,
    axis: &Path,
    pairs: &Path,
    lexicon: Option<&str>,
    source: &LexiconSource,
    top_k: usize,
    exclude: &[String],
    out: &mut Outputs,
) -> Result<()> {
    let lex = lexicon.map(|l| load_lexicon(source, l, out)).transpose()?;
    let model = load_models(&[model.to_path_buf()], out)?.remove(0);
    let spec = load_axes(&[axis.to_path_buf()], out)?.remove(0);
    out.input(pairs);
    let list = load_antonym_pairs(pairs)?;
    let ax = build_axis(&model, &spec, g.fallback)?;
    let ranking = match &lex {
        Some(l) => sentiment_filtered_alignment(&model, &ax, &list.pairs, l, Some(top_k), g.fallback)?,
        None => alignment_ranking(&model, &ax, &list.pairs, Some(top_k), g.fallback)?,
    };
    if ranking.unresolved > 0 {
        log::info!(
            "{} antonym pairs have a word missing from '{}'",
            ranking.unresolved,
            model.name()
        );
    }
    let stem = format!("alignment_{}_{}", slug(&spec.name), slug(model.name()));
    out.add(format!("{stem}.csv"), report::alignment_csv(&ranking)?);
    out.add(
        format!("{stem}.svg"),
        report::alignment_strip_svg(&ranking, &spec.pole1.name, &spec.pole2.name, exclude),
    );
    out.add_json(&format!("{stem}.json"), g.seed, &ranking)
}

fn groundtruth(g: &Global, model: &Path, axis: &Path, targets: &Path, out: &mut Outputs) -> Result<()> {
    let model = load_models(&[model.to_path_buf()], out)?.remove(0);
    let spec = load_axes(&[axis.to_path_buf()], out)?.remove(0);
    out.input(targets);
    let t = load_targets(targets)?;
    let ax = build_axis(&model, &spec, g.fallback)?;
    let r = ground_truth_correlation(&model, &ax, &t, g.fallback)?;
    if !r.unresolved.is_empty() {
        log::warn!(
            "{} target words not found: {}",
            r.unresolved.len(),
            r.unresolved.join(", ")
        );
    }
    let stem = format!("groundtruth_{}_{}", slug(&spec.name), slug(model.name()));
    let pts: Vec<ScatterPoint> = r
        .points
        .iter()
        .map(|p| ScatterPoint {
            word: p.word.clone(),
            x: p.projection,
            y: p.value,
            polarity: None,
        })
        .collect();
    out.add(format!("{stem}.csv"), report::ground_truth_csv(&r)?);
    out.add(
        format!("{stem}.svg"),
        report::scatter_svg(
            &pts,
            &format!("{} -> {}", spec.pole1.name, spec.pole2.name),
            "value",
            &format!("{} (pearson r = {})", spec.name, fmt_num(r.pearson.coefficient)),
        ),
    );
    out.add_json(&format!("{stem}.json"), g.seed, &r)
}

fn lexicon_stats(g: &Global, source: &LexiconSource, names: &[String], out: &mut Outputs) -> Result<()> {
    let lexicons = load_lexicons(source, names, out)?;
    let u = union_vocabulary(&lexicons)?;
    #[derive(serde::Serialize)]
    struct UnionSummary {
        lexicons: Vec<String>,
        words: usize,
        positive_majority: usize,
        negative_majority: usize,
        ties: usize,
    }
    let summary = UnionSummary {
        lexicons: u.lexicons.clone(),
        words: u.len(),
        positive_majority: u.count_majority(Polarity::Positive),
        negative_majority: u.count_majority(Polarity::Negative),
        ties: u.ties(),
    };
    out.add("lexicon_stats.csv", report::lexicon_stats_csv(&lexicons)?);
    out.add("lexicon_union.csv", report::union_csv(&u)?);
    out.add_json("lexicon_union.json", g.seed, &summary)
}

fn scatter(
    g: &Global,
    model: &Path,
    axis_x: &Path,
    axis_y: &Path,
    source: &LexiconSource,
    names: &[String],
    out: &mut Outputs,
) -> Result<()> {
    let lexicons = load_lexicons(source, names, out)?;
    let model = load_models(&[model.to_path_buf()], out)?.remove(0);
    let sx = load_axes(&[axis_x.to_path_buf()], out)?.remove(0);
    let sy = load_axes(&[axis_y.to_path_buf()], out)?.remove(0);
    let ax = build_axis(&model, &sx, g.fallback)?;
    let ay = build_axis(&model, &sy, g.fallback)?;
    let u = union_vocabulary(&lexicons)?;
    let mut pts = Vec::new();
    for e in &u.entries {
        let Some(p) = e.majority() else { continue };
        if let Some(l) = model.lookup(&e.word, g.fallback) {
            pts.push(ScatterPoint {
                word: e.word.clone(),
                x: ax.project(&l.vector)?,
                y: ay.project(&l.vector)?,
                polarity: Some(p),
            });
        }
    }
    let stem = format!("scatter_{}_{}_{}", slug(&sx.name), slug(&sy.name), slug(model.name()));
    let csv = report::csv_string(
        &["word", "x", "y", "polarity"],
        pts.iter().map(|p| {
            vec![
                p.word.clone(),
                fmt_num(p.x),
                fmt_num(p.y),
                p.polarity.map(|p| p.as_str().to_string()).unwrap_or_default(),
            ]
        }),
    )?;
    out.add(format!("{stem}.csv"), csv);
    out.add(
        format!("{stem}.svg"),
        report::scatter_svg(
            &pts,
            &format!("{} -> {}", sx.pole1.name, sx.pole2.name),
            &format!("{} -> {}", sy.pole1.name, sy.pole2.name),
            model.name(),
        ),
    );
    Ok(())
}

fn bars(from: &Path, alpha: f64, out: &mut Outputs) -> Result<()> {
    #[derive(Deserialize)]
    struct Doc {
        result: BiasMatrix,
    }
    out.input(from);
    let text = fs::read_to_string(from).map_err(|e| Error::io(from, e))?;
    let doc: Doc = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", from.display())))?;
    out.family_size = Some(doc.result.family_size);
    out.add("bias_bars.svg", report::bias_bars_svg(&doc.result, alpha));
    Ok(())
}

fn sorted_files(dir: &Path, exts: &[&str]) -> Result<Vec<PathBuf>> {
    let mut v = Vec::new();
    for e in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let p = e.map_err(|e| Error::io(dir, e))?.path();
        if p.is_file()
            && p.extension()
                .and_then(|x| x.to_str())
                .is_some_and(|x| exts.contains(&x))
        {
            v.push(p);
        }
    }
    v.sort();
    Ok(v)
}

enum Benchmark {
    Similarity(SimilarityDataset),
    Analogy(AnalogyDataset),
}

fn load_benchmarks(dir: &Path, suite: Suite, out: &mut Outputs) -> Result<Vec<Benchmark>> {
    if !dir.is_dir() {
        return Err(Error::InvalidArgument(format!(
            "no benchmark folder at {}",
            dir.display()
        )));
    }
    let mut b = Vec::new();
    let sim = dir.join("similarity");
    if suite != Suite::Analogy && sim.is_dir() {
        for f in sorted_files(&sim, &["txt", "csv", "tsv"])? {
            out.input(&f);
            b.push(Benchmark::Similarity(load_similarity(&f)?));
        }
    }
    if suite != Suite::Similarity {
        let an = dir.join("analogy");
        if an.is_dir() {
            for f in sorted_files(&an, &["txt"])? {
                out.input(&f);
                let stem = f
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let mut d = load_google_analogies(&f)?;
                d.name = stem;
                for part in [d.google_semantic(), d.google_syntactic()] {
                    if !part.quads.is_empty() {
                        b.push(Benchmark::Analogy(part));
                    }
                }
            }
        }
        let bats = dir.join("bats");
        if bats.is_dir() {
            let mut cats: Vec<PathBuf> = fs::read_dir(&bats)
                .map_err(|e| Error::io(&bats, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_dir())
                .collect();
            cats.sort();
            if cats.is_empty() {
                cats.push(bats.clone());
            }
            for c in cats {
                out.input(&c);
                let name = c
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                b.push(Benchmark::Analogy(load_bats_dir(&c, name)?));
            }
        }
    }
    if b.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no benchmark files under {}",
            dir.display()
        )));
    }
    Ok(b)
}

fn eval(
    g: &Global,
    model_paths: &[PathBuf],
    suite: Suite,
    dir: &Path,
    opts: &AnalogyOptions,
    predictions: bool,
    out: &mut Outputs,
) -> Result<()> {
    let benchmarks = load_benchmarks(dir, suite, out)?;
    let models = load_models(model_paths, out)?;
    let mut rows = Vec::new();
    let mut sims = Vec::new();
    let mut analogies = Vec::new();
    for m in &models {
        let view = m.restrict_top_k(opts.vocab_limit.unwrap_or(usize::MAX))?;
        for b in &benchmarks {
            match b {
                Benchmark::Similarity(d) => match similarity_eval(&view, d, g.fallback) {
                    Ok(r) => {
                        rows.push(report::similarity_row(&r));
                        sims.push(r);
                    }
                    Err(Error::EmptyIntersection(msg)) => {
                        log::warn!("{msg}");
                        out.degenerate = true;
                    }
                    Err(e) => return Err(e),
                },
                Benchmark::Analogy(d) => match analogy_eval(m, d, opts) {
                    Ok(r) => {
                        rows.push(report::analogy_row(&r));
                        if predictions {
                            let csv = report::csv_string(
                                &["a", "a_star", "b", "gold", "predicted", "attempted", "correct"],
                                d.quads.iter().zip(&r.predictions).map(|(q, p)| {
                                    vec![
                                        q.a.clone(),
                                        q.a_star.clone(),
                                        q.b.clone(),
                                        q.gold().to_string(),
                                        p.predicted.clone().unwrap_or_default(),
                                        p.attempted.to_string(),
                                        p.correct.to_string(),
                                    ]
                                }),
                            )?;
                            out.add(format!("predictions_{}_{}.csv", slug(m.name()), slug(&d.name)), csv);
                        }
                        analogies.push(r);
                    }
                    Err(Error::EmptyIntersection(msg)) => {
                        log::warn!("{msg}");
                        out.degenerate = true;
                    }
                    Err(e) => return Err(e),
                },
            }
        }
    }
    #[derive(serde::Serialize)]
    struct EvalDoc<'a> {
        vocab_limit: Option<usize>,
        similarity: &'a [axisprobe::evaluation::SimilarityResult],
        analogy: Vec<AnalogySummary<'a>>,
    }
    #[derive(serde::Serialize)]
    struct AnalogySummary<'a> {
        dataset: &'a str,
        model: &'a str,
        accuracy: f64,
        correct: usize,
        attempted: usize,
        skipped: usize,
        strict: bool,
    }
    let doc = EvalDoc {
        vocab_limit: opts.vocab_limit,
        similarity: &sims,
        analogy: analogies
            .iter()
            .map(|r| AnalogySummary {
                dataset: &r.dataset,
                model: &r.model,
                accuracy: r.accuracy,
                correct: r.correct,
                attempted: r.attempted,
                skipped: r.skipped,
                strict: r.strict,
            })
            .collect(),
    };
    out.add("table1.csv", report::csv_string(&report::EVAL_HEADER, rows)?);
    out.add_json("eval.json", g.seed, &doc)
}
