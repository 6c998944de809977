use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qaswap::pipeline::{
    run_augment, run_convert_tydiqa, run_report, run_subsample, run_validate, AugmentSettings, SubsampleConfig,
};
use qaswap::{Error, Result, Strategy};

/// Generate unanswerable questions from answerable QA seeds by antonym and
/// entity swaps.
#[derive(Debug, Parser)]
#[command(name = "qaswap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a corpus, and optionally a sidecar against it.
    Validate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Generate unanswerable questions and merge them into the corpus.
    Augment(AugmentArgs),
    /// Write the original corpus plus nested random samples of its generated
    /// questions, one file per size.
    Subsample {
        #[arg(long)]
        corpus: PathBuf,
        /// Comma-separated sample sizes, e.g. 100,500,1000.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Sample only from one augmenter's questions.
        #[arg(long, value_parser = parse_strategy)]
        strategy: Option<Strategy>,
    },
    /// Convert a TydiQA primary-task file to SQuAD 2.0 (minimal spans only).
    ConvertTydiqa {
        /// TydiQA JSONL, optionally gzipped.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "english")]
        language: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Count answerable and unanswerable questions by origin.
    Report {
        #[arg(long = "corpus", required = true)]
        corpora: Vec<PathBuf>,
        /// Also write the counts as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct AugmentArgs {
    /// TOML file with default settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long)]
    wordnet_dir: Option<PathBuf>,
    /// antonym, entity or both [default: both]
    #[arg(long)]
    strategy: Option<String>,
    /// none, random or ppl [default: ppl for antonyms, random for entities]
    #[arg(long)]
    filter: Option<String>,
    /// ngram or external:<path> [default: ngram]
    #[arg(long)]
    scorer: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Augmented corpus.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Generation report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Every candidate before filtering, as id<TAB>text.
    #[arg(long)]
    candidates_out: Option<PathBuf>,
    /// synset or lemma [default: synset]
    #[arg(long)]
    antonym_scope: Option<String>,
    #[arg(long)]
    ngram_order: Option<usize>,
    #[arg(long)]
    ngram_k: Option<f64>,
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    match s {
        "antonym" => Ok(Strategy::Antonym),
        "entity" => Ok(Strategy::Entity),
        other => Err(format!("unknown strategy {other:?}; expected antonym or entity")),
    }
}

fn write_json(path: &PathBuf, json: &str) -> Result<()> {
    std::fs::write(path, json).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })
}

fn augment(args: AugmentArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => AugmentSettings::from_toml_file(path)?,
        None => AugmentSettings::default(),
    };
    let flags = AugmentSettings {
        corpus: args.corpus,
        sidecar: args.sidecar,
        wordnet_dir: args.wordnet_dir,
        strategy: args.strategy,
        filter: args.filter,
        scorer: args.scorer,
        seed: args.seed,
        out: args.out,
        report: args.report,
        candidates_out: args.candidates_out,
        antonym_scope: args.antonym_scope,
        ngram_order: args.ngram_order,
        ngram_k: args.ngram_k,
    };
    let cfg = file.overridden_by(flags).resolve()?;
    let outcome = run_augment(&cfg)?;
    print!("{}", outcome.report.render_table(&cfg.corpus.display().to_string()));
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Validate { corpus, sidecar } => {
            let report = run_validate(&corpus, sidecar.as_deref())?;
            print!("{}", report.render_table(&corpus.display().to_string()));
            println!("ok");
        }
        Command::Augment(args) => augment(args)?,
        Command::Subsample {
            corpus,
            sizes,
            seed,
            out,
            strategy,
        } => {
            let cfg = SubsampleConfig {
                corpus,
                sizes,
                seed,
                out_dir: out,
                strategy,
            };
            for path in run_subsample(&cfg)? {
                println!("{}", path.display());
            }
        }
        Command::ConvertTydiqa {
            corpus,
            language,
            out,
            report,
        } => {
            let counts = run_convert_tydiqa(&corpus, &language, &out)?;
            print!("{}", counts.render_table(&out.display().to_string()));
            if let Some(path) = report {
                write_json(&path, &counts.to_json())?;
            }
        }
        Command::Report { corpora, report } => {
            let reports = run_report(&corpora)?;
            for (path, r) in &reports {
                println!("{}", r.render_table(&path.display().to_string()));
            }
            if let Some(path) = report {
                let by_file: serde_json::Map<String, serde_json::Value> = reports
                    .iter()
                    .map(|(p, r)| (p.display().to_string(), serde_json::to_value(r).expect("report serializes")))
                    .collect();
                let json = serde_json::to_string_pretty(&by_file).expect("report serializes");
                write_json(&path, &json)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Error::Validation(violations) = &e {
                for v in violations {
                    eprintln!("{v}");
                }
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
