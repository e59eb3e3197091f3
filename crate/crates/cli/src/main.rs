mod commands;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use slavparse::corpus::DatasetFilter;
use slavparse::eval::LabelMode;

#[derive(Parser)]
#[command(name = "slavparse", version, about = "Joint tagging and dependency parsing for early Slavic treebanks")]
struct Cli {
    /// Directory that relative paths in manifests resolve against.
    #[arg(long, global = true, env = "SLAVPARSE_DATA_DIR")]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert CoNLL-X with positional morphotags to CoNLL-U.
    Convert {
        #[arg(long)]
        input: PathBuf,
        /// Tab-separated morphotag table.
        #[arg(long)]
        mapping: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Write `<label>.{train,dev,test}.conllu` for every text in a manifest.
    Split {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Token counts per text and per variety.
    Stats {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Train one model and keep the epoch with the best development LAS.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Where to write the trained model.
        #[arg(long)]
        output: PathBuf,
        /// Per-epoch training log (JSON).
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Train every LSTM/MLP size combination and keep the best model.
    Grid {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', default_value = "128,256")]
        lstm_grid: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "100,200,300")]
        mlp_grid: Vec<usize>,
        /// Model name in the report, e.g. jPTDP-GEN.
        #[arg(long)]
        name: Option<String>,
        /// Where to write the best model.
        #[arg(long)]
        output: PathBuf,
        /// Ranked grid results (JSON).
        #[arg(long)]
        results: Option<PathBuf>,
    },
    /// Annotate a CoNLL-U file with predicted UPOS, HEAD and DEPREL.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Score predictions against gold annotation.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long, value_enum, default_value = "full")]
        label_mode: LabelModeArg,
        /// Append the scores to this results file (JSON) for `report`.
        #[arg(long)]
        results: Option<PathBuf>,
        /// Test set name stored with the scores.
        #[arg(long, default_value = "test")]
        test_set: String,
        /// Model name stored with the scores.
        #[arg(long, default_value = "model")]
        model_name: String,
    },
    /// Render collected results as comparison tables.
    Report {
        /// Score files written by `eval`.
        #[arg(long, num_args = 1..)]
        results: Vec<PathBuf>,
        /// Grid files written by `grid`.
        #[arg(long, num_args = 1..)]
        grid: Vec<PathBuf>,
        /// Also print published scores.
        #[arg(long)]
        published: bool,
        /// Write the score table as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LabelModeArg {
    Full,
    Universal,
}

impl From<LabelModeArg> for LabelMode {
    fn from(m: LabelModeArg) -> Self {
        match m {
            LabelModeArg::Full => LabelMode::Full,
            LabelModeArg::Universal => LabelMode::Universal,
        }
    }
}

#[derive(Args, Clone)]
struct SplitArgs {
    /// Shuffle sentences (with --seed) before splitting instead of cutting in order.
    #[arg(long)]
    shuffle: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct DataArgs {
    /// Corpus manifest; train/dev sections are assembled from it.
    #[arg(long, conflicts_with = "train_file")]
    manifest: Option<PathBuf>,
    /// Macro-area filter for manifest texts.
    #[arg(long, default_value = "GEN")]
    filter: DatasetFilter,
    /// Training CoNLL-U files, instead of a manifest.
    #[arg(long = "train-file")]
    train_file: Vec<PathBuf>,
    /// Development CoNLL-U files, used with --train-file.
    #[arg(long = "dev-file")]
    dev_file: Vec<PathBuf>,
    /// Shuffle sentences before the ratio split.
    #[arg(long)]
    shuffle_split: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Precision {
    F32,
    F64,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 50)]
    char_dim: usize,
    #[arg(long, default_value_t = 100)]
    word_dim: usize,
    #[arg(long, default_value_t = 100)]
    pos_dim: usize,
    #[arg(long, default_value_t = 128)]
    lstm_dim: usize,
    #[arg(long, default_value_t = 100)]
    mlp_dim: usize,
    #[arg(long, default_value_t = 30)]
    epochs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    learning_rate: f64,
    #[arg(long, default_value_t = 0.25)]
    word_dropout: f64,
    #[arg(long, default_value_t = 0.5)]
    gold_tag_prob: f64,
    #[arg(long, value_enum, default_value = "f32")]
    precision: Precision,
}

/// Failure classes with their exit codes.
enum Failure {
    /// Bad invocation: exit 1.
    Usage(String),
    /// Unreadable or invalid data: exit 2.
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
