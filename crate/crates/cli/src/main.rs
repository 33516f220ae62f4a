mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scriptid::corpus::{Level, Modality};

#[derive(Parser, Debug)]
#[command(name = "scriptid", version, about = "Script identification toolkit")]
struct Cli {
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true, env = "SCRIPTID_JOBS", value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,

    /// key=value file supplying defaults for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Binarize and equalize ink of every PNG under a directory.
    Preprocess(PreprocessArgs),
    /// Cut document pages into line and word images.
    Segment(SegmentArgs),
    /// Scan a corpus tree and write its manifest.
    Manifest(ManifestArgs),
    /// Compute one descriptor for every manifest sample.
    Extract(ExtractArgs),
    /// Train the models of a task and save them.
    Train(TaskArgs),
    /// Train and test a task, writing hit-ratio, confusion and CMC reports.
    Evaluate(EvaluateArgs),
    /// Render a synthetic stroke-texture corpus.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct PreprocessArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = scriptid::imagecore::DEFAULT_WINDOW)]
    window: usize,
    #[arg(long, default_value_t = scriptid::imagecore::DEFAULT_SENSITIVITY)]
    sensitivity: f64,
    /// Write the ink mask instead of the equalized image.
    #[arg(long)]
    binary: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum PseudoWords {
    Auto,
    Always,
    Never,
}

#[derive(Args, Debug)]
struct SegmentArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Group characters into pseudo-words: per script, always or never.
    #[arg(long, value_enum, default_value = "auto")]
    pseudo_words: PseudoWords,
    /// Write lines only.
    #[arg(long)]
    no_words: bool,
}

#[derive(Args, Debug)]
struct ManifestArgs {
    #[arg(long)]
    root: PathBuf,
    /// Defaults to `<root>/manifest.csv`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Modality for every file instead of the top directory name.
    #[arg(long)]
    modality: Option<Modality>,
    /// Also write per-script counts as CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// lbp, hot or dmb.
    #[arg(long)]
    extractor: String,
    #[arg(long)]
    output: PathBuf,
    /// Defaults to `<output>.labels.csv`.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    level: Option<Level>,
    #[arg(long)]
    modality: Option<Modality>,
}

#[derive(Args, Debug)]
struct TaskArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// 1, 2 or 3.
    #[arg(long)]
    task: scriptid::bench::Task,
    /// 1 (lbp-hot) or 2 (dmb).
    #[arg(long)]
    benchmark: String,
    #[arg(long)]
    output: PathBuf,
    /// Foreground pixels per training cell.
    #[arg(long, default_value_t = scriptid::bench::DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Fixed training counts instead of the budget (mdiw13-table4).
    #[arg(long)]
    preset: Option<scriptid::bench::Preset>,
    /// RBF gamma grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<f64>>,
    /// Regularization grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    regs: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    task: TaskArgs,
    /// Also plot CMC curves as SVG.
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long, default_value_t = 5)]
    docs: usize,
    #[arg(long, default_value_t = 8)]
    lines: usize,
    #[arg(long, default_value_t = 6)]
    words: usize,
    #[arg(long, default_value_t = 13)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "printed")]
    modalities: Vec<Modality>,
}

pub enum Failure {
    Usage(String),
    Data(scriptid::Error),
}

impl From<scriptid::Error> for Failure {
    fn from(e: scriptid::Error) -> Self {
        Failure::Data(e)
    }
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Preprocess(a) => commands::preprocess(a),
        Command::Segment(a) => commands::segment(a),
        Command::Manifest(a) => commands::manifest(a),
        Command::Extract(a) => commands::extract(a),
        Command::Train(a) => commands::train(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(cells) => {
            println!("STATUS=ok cells={cells}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
