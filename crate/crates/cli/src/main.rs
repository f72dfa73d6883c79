use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use attrib_cli::error::{EXIT_OK, EXIT_USAGE};
use attrib_cli::{cmd_eval, cmd_reformat, cmd_run, cmd_run_eval, cmd_stats, CliError, EvalOptions, RunOptions, Source};
use attrib_core::eval::{Averaging, ReportFormat, DEFAULT_KS};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Sentence-level attribution of generated answers to source documents.
#[derive(Parser)]
#[command(name = "attrib", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Verifiability,
    Hagrid,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => ReportFormat::Table,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Convert a raw corpus directory into canonical JSONL.
    Reformat {
        #[arg(value_enum)]
        source: SourceArg,
        /// Directory holding the raw split files.
        #[arg(long = "dataset", alias = "raw")]
        raw_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print dataset statistics.
    Stats {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Attribute every record and write predictions plus a run manifest.
    Run(RunArgs),
    /// Score a predictions file against gold attributions.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Run, then evaluate the fresh predictions.
    RunEval {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        eval: EvalArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    /// Predictions JSONL; the manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    out: PathBuf,
    /// Record-level worker threads (overrides the config).
    #[arg(long)]
    workers: Option<usize>,
    /// Only process the first N records.
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
    /// Pool hit counts across sentences instead of averaging per sentence.
    #[arg(long)]
    micro: bool,
    /// Cutoffs, comma separated.
    #[arg(long = "k", value_delimiter = ',', default_values_t = DEFAULT_KS.to_vec())]
    ks: Vec<usize>,
    /// Also write the JSON report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

impl EvalArgs {
    fn options(&self, dataset: PathBuf, predictions: PathBuf, limit: Option<usize>) -> EvalOptions {
        EvalOptions {
            dataset,
            predictions,
            format: self.format.into(),
            averaging: if self.micro { Averaging::Micro } else { Averaging::Macro },
            ks: self.ks.clone(),
            limit,
            report_path: self.report.clone(),
        }
    }
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            config_path: self.config.clone(),
            dataset: self.dataset.clone(),
            out_path: self.out.clone(),
            workers: self.workers,
            limit: self.limit,
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Reformat { source, raw_dir, out: out_path } => {
            let source = match source {
                SourceArg::Verifiability => Source::Verifiability,
                SourceArg::Hagrid => Source::Hagrid,
            };
            cmd_reformat(source, &raw_dir, &out_path, out)
        }
        Command::Stats { dataset, format, limit } => cmd_stats(&dataset, format.into(), limit, out),
        Command::Run(args) => cmd_run(&args.options(), out).map(|_| ()),
        Command::Eval { dataset, predictions, eval } => cmd_eval(&eval.options(dataset, predictions, None), out).map(|_| ()),
        Command::RunEval { run, eval } => {
            let eval = eval.options(run.dataset.clone(), run.out.clone(), run.limit);
            cmd_run_eval(&run.options(), &eval, out).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match dispatch(cli, &mut lock) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
