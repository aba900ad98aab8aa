mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

/// Temporally aligned word embeddings from time-sliced corpora.
#[derive(Debug, Parser)]
#[command(name = "dynembed", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand. Each flag overrides the matching
/// key of the `--config` file.
#[derive(Debug, Args)]
struct Common {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus directory (one integer-named folder per slice) or JSONL file.
    #[arg(long)]
    corpus: Option<String>,
    #[arg(long)]
    stopwords: Option<String>,
    /// Output directory for all artifacts.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    min_count: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    shift: Option<String>,
    /// dw2v, sw2v, tw2v or aw2v.
    #[arg(long)]
    method: Option<String>,
    /// How U and W are combined: average, u or w.
    #[arg(long)]
    combine: Option<String>,
    #[arg(long)]
    tw2v_k: Option<String>,
    /// Disable data parallelism.
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    epochs: Option<String>,
    #[arg(long)]
    block_rows: Option<String>,
    #[arg(long)]
    init_scale: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_text(&text, path)?;
        }
        let flags = [
            ("corpus", &self.corpus),
            ("stopwords", &self.stopwords),
            ("out", &self.out),
            ("min_count", &self.min_count),
            ("window", &self.window),
            ("shift", &self.shift),
            ("method", &self.method),
            ("combine", &self.combine),
            ("tw2v_k", &self.tw2v_k),
            ("dim", &self.dim),
            ("lambda", &self.lambda),
            ("tau", &self.tau),
            ("gamma", &self.gamma),
            ("epochs", &self.epochs),
            ("block_rows", &self.block_rows),
            ("init_scale", &self.init_scale),
            ("seed", &self.seed),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if self.sequential {
            cfg.sequential = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tokenize the corpus, build the vocabulary, co-occurrence counts and PPMI matrices.
    Build {
        #[command(flatten)]
        common: Common,
    },
    /// Train embeddings with the selected method.
    Train {
        #[command(flatten)]
        common: Common,
        /// Write a checkpoint after every epoch (dw2v only).
        #[arg(long)]
        checkpoint: bool,
        /// Continue from the checkpoint in the output directory.
        #[arg(long)]
        resume: bool,
    },
    /// Nearest neighbors of a word-slice pair in a target slice.
    Query {
        #[command(flatten)]
        common: Common,
        word: String,
        #[arg(long)]
        label: i64,
        /// Defaults to the query's own slice.
        #[arg(long)]
        target: Option<i64>,
        #[arg(short, long, default_value_t = 10)]
        k: usize,
        /// One row per slice.
        #[arg(long)]
        all_years: bool,
        /// Leave the query word out of same-slice results.
        #[arg(long)]
        exclude_self: bool,
    },
    /// Clustering and cross-time alignment metrics.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// CSV: query_word,query_label,target_label,answer_word
        #[arg(long)]
        testset: Option<PathBuf>,
        /// CSV: word,label,section,strength
        #[arg(long)]
        triplets: Option<PathBuf>,
        /// JSON report path; a text copy is written next to it.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        allow_same_slice: bool,
        #[arg(long, default_value_t = dynembed::eval::DEFAULT_BETA)]
        beta: f64,
        #[arg(long, default_value_t = dynembed::eval::DEFAULT_MIN_STRENGTH)]
        min_strength: f64,
        #[arg(long, default_value_t = dynembed::eval::DEFAULT_TOP_PER_SECTION)]
        top_per_section: usize,
    },
    /// Subsample selected slices and compare dw2v and aw2v alignment quality.
    Robustness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        testset: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.1, 0.01, 0.001])]
        rates: Vec<f64>,
        /// Subsample slices whose index is `offset` modulo `every`.
        #[arg(long, default_value_t = 3)]
        every: usize,
        #[arg(long, default_value_t = 0)]
        offset: usize,
    },
    /// Per-slice vector norms of chosen words as CSV.
    ExportNorms {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        words: Vec<String>,
        /// File with one word per line.
        #[arg(long)]
        word_file: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lookup(String),
    Empty(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Lookup(_) => 3,
            Failure::Empty(_) => 4,
            Failure::Internal(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Lookup(m) | Failure::Empty(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl From<dynembed::Error> for Failure {
    fn from(e: dynembed::Error) -> Self {
        use dynembed::Error as E;
        let msg = e.to_string();
        match e {
            E::EmptyEvaluation(_) => Failure::Empty(msg),
            E::InvalidArgument(_) | E::EmptyVocabulary { .. } | E::PathIo { .. } => Failure::Usage(msg),
            _ => Failure::Internal(msg),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Build { common } => commands::build(&common.resolve()?),
        Command::Train {
            common,
            checkpoint,
            resume,
        } => commands::train(&common.resolve()?, checkpoint, resume),
        Command::Query {
            common,
            word,
            label,
            target,
            k,
            all_years,
            exclude_self,
        } => commands::query(
            &common.resolve()?,
            &commands::QueryArgs {
                word,
                label,
                target,
                k,
                all_years,
                exclude_self,
            },
        ),
        Command::Evaluate {
            common,
            testset,
            triplets,
            report,
            allow_same_slice,
            beta,
            min_strength,
            top_per_section,
        } => commands::evaluate(
            &common.resolve()?,
            &commands::EvaluateArgs {
                testset,
                triplets,
                report,
                allow_same_slice,
                beta,
                min_strength,
                top_per_section,
            },
        ),
        Command::Robustness {
            common,
            testset,
            rates,
            every,
            offset,
        } => commands::robustness(&common.resolve()?, &testset, &rates, every, offset),
        Command::ExportNorms {
            common,
            words,
            word_file,
            output,
        } => commands::export_norms(&common.resolve()?, words, word_file.as_deref(), output),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
