use std::path::PathBuf;
use std::process::ExitCode;

use axisprobe::{Fallback, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod logger;
mod output;

/// Screen word embeddings for sentiment associations along cultural axes.
#[derive(Parser, Debug)]
#[command(name = "axisprobe", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory (output file for `convert`).
    #[arg(long, global = true, default_value = "axisprobe-out")]
    pub out: PathBuf,
    /// Word lookup policy.
    #[arg(long, global = true, default_value = "lowercase", value_parser = parse_fallback)]
    pub fallback: Fallback,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[arg(short, long, global = true)]
    pub quiet: bool,
}

fn parse_fallback(s: &str) -> std::result::Result<Fallback, String> {
    s.parse().map_err(|e: axisprobe::Error| e.to_string())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    #[value(name = "word2vec-bin")]
    Word2vecBin,
    Text,
    Cache,
    Auto,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CorrMethod {
    Spearman,
    Pearson,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Similarity,
    Analogy,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AnalogyScorer {
    #[value(name = "3cosadd")]
    CosAdd,
    #[value(name = "3cosmul")]
    CosMul,
}

#[derive(Args, Debug, Clone)]
pub struct ScreenArgs {
    /// Embedding files (cache, word2vec .bin or text vectors).
    #[arg(long, num_args = 1.., required = true)]
    pub models: Vec<PathBuf>,
    /// Axis JSON files or directories of them.
    #[arg(long, num_args = 1.., required = true)]
    pub axes: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = CorrMethod::Spearman)]
    pub method: CorrMethod,
    /// Minimum share of pole words found in a model (per-axis files may override).
    #[arg(long)]
    pub min_pole_coverage: Option<f64>,
    /// Restrict every model to the lexicon words found in all models.
    #[arg(long)]
    pub shared_vocab: bool,
    /// Bonferroni family size; defaults to the number of cells in the run.
    #[arg(long)]
    pub family_size: Option<usize>,
    #[arg(long, default_value_t = axisprobe::stats::DEFAULT_ALPHA)]
    pub alpha: f64,
}

#[derive(Args, Debug, Clone)]
pub struct LexiconSource {
    /// Folder holding one subfolder per lexicon.
    #[arg(long, default_value = "data/lexicons")]
    pub lexicons_root: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convert an embedding file into the binary cache format.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
        /// Text files: whether the first line is a `vocab dim` header.
        #[arg(long)]
        header: Option<bool>,
        /// Keep only the first k rows.
        #[arg(long)]
        top_k: Option<usize>,
    },
    /// Word similarity and analogy benchmarks.
    Eval {
        #[arg(long, num_args = 1.., required = true)]
        model: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Folder with `similarity/`, `analogy/` and `bats/` subfolders.
        #[arg(long, default_value = "data/benchmarks")]
        benchmarks: PathBuf,
        #[arg(long, default_value_t = axisprobe::evaluation::DEFAULT_VOCAB_LIMIT)]
        vocab_limit: usize,
        /// Count quads with unknown words as wrong.
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value_t = AnalogyScorer::CosAdd)]
        scorer: AnalogyScorer,
        /// Also write per-quad predictions.
        #[arg(long)]
        predictions: bool,
    },
    /// Bias matrix of one lexicon over models x axes.
    Screen {
        #[command(flatten)]
        screen: ScreenArgs,
        #[command(flatten)]
        source: LexiconSource,
        /// Lexicon name under the lexicon root, or a lexicon folder.
        #[arg(long, default_value = "hgi")]
        lexicon: String,
    },
    /// Pole-excision robustness experiment.
    Excise {
        #[command(flatten)]
        screen: ScreenArgs,
        #[command(flatten)]
        source: LexiconSource,
        #[arg(long, default_value = "hgi")]
        lexicon: String,
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.75])]
        fractions: Vec<f64>,
        #[arg(long, default_value_t = 500)]
        reps: usize,
    },
    /// Screen with several lexicons and measure their agreement.
    Ensemble {
        #[command(flatten)]
        screen: ScreenArgs,
        #[command(flatten)]
        source: LexiconSource,
        /// Lexicon names, or `all`.
        #[arg(long, num_args = 1.., default_value = "all")]
        lexicons: Vec<String>,
    },
    /// Rank antonym-pair axes by alignment with a cultural axis.
    Align {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        axis: PathBuf,
        #[arg(long, default_value = "data/antonyms/wordnet_antonyms.tsv")]
        pairs: PathBuf,
        /// Keep only pairs whose two words carry labels in this lexicon.
        #[arg(long)]
        lexicon: Option<String>,
        #[command(flatten)]
        source: LexiconSource,
        #[arg(long, default_value_t = 100)]
        top_k: usize,
        /// Words left out of the strip plot (data files keep them).
        #[arg(long)]
        exclude: Vec<String>,
    },
    /// Correlate axis projections with an external per-word metric.
    Groundtruth {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        axis: PathBuf,
        /// `word,value` CSV with a header line.
        #[arg(long)]
        targets: PathBuf,
    },
    /// Lexicon inventory and union statistics.
    Lexicon {
        #[command(subcommand)]
        action: LexiconAction,
    },
    /// Figures from screening inputs or earlier outputs.
    Plot {
        #[command(subcommand)]
        action: PlotAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum LexiconAction {
    Stats {
        #[command(flatten)]
        source: LexiconSource,
        /// Lexicon names; all when omitted.
        names: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum PlotAction {
    /// Majority-label union words on two axes.
    Scatter {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        axis_x: PathBuf,
        #[arg(long)]
        axis_y: PathBuf,
        #[command(flatten)]
        source: LexiconSource,
        #[arg(long, num_args = 1.., default_value = "all")]
        lexicons: Vec<String>,
    },
    /// Re-render bias bars from a `bias_matrix.json`.
    Bars {
        #[arg(long)]
        from: PathBuf,
        #[arg(long, default_value_t = axisprobe::stats::DEFAULT_ALPHA)]
        alpha: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    logger::init(cli.global.verbose, cli.global.quiet);
    let threads = cli.global.threads;
    let run = || -> Result<bool> { commands::run(&cli) };
    match axisprobe::parallel::with_threads(threads, run).and_then(|r| r) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(2)
        }
    }
}
