use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use salience::association::SimilarityScope;
use salience::corpus::Granularity;
use salience::pipeline::{self, AnalysisParams, RenderRequest, RunConfig};
use salience::salience::Normalization;
use salience::synth::{generate_corpus, SynthSpec};
use salience::{Error, Result};

#[derive(Parser)]
#[command(name = "salience", version, about = "Track topic salience over a time-stamped corpus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the whole pipeline and write every artifact plus a manifest.
    Analyze {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        framework: PathBuf,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus and its ground-truth file.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write ngram_trends.csv from a corpus.
    Trends {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write similarity.csv from a corpus and framework.
    Similarity {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        framework: PathBuf,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write associations.json from ngram_trends.csv and similarity.csv.
    Associate {
        #[arg(long = "in")]
        dir: PathBuf,
        #[arg(long)]
        framework: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Write salience tables and matrices from associations.json.
    Salience {
        #[arg(long = "in")]
        dir: PathBuf,
        #[arg(long)]
        framework: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Draw SVG charts into <in>/charts.
    Render {
        #[arg(long = "in")]
        dir: PathBuf,
        /// Comma-separated topic ids for line charts.
        #[arg(long, value_delimiter = ',')]
        topics: Vec<String>,
        /// Comma-separated n-grams for a usage chart.
        #[arg(long, value_delimiter = ',')]
        ngrams: Vec<String>,
        /// Draw one heat grid per salience matrix.
        #[arg(long)]
        matrices: bool,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long = "bin", default_value_t = Granularity::Month)]
    granularity: Granularity,
    #[arg(long = "min-count", default_value_t = 5)]
    min_count: u64,
    #[arg(long, default_value_t = 75.0)]
    percentile: f64,
    #[arg(long = "sim-scope", default_value_t = SimilarityScope::PerTopic)]
    sim_scope: SimilarityScope,
    #[arg(long = "norm", default_value_t = Normalization::ZScore)]
    norm: Normalization,
    #[arg(long = "no-titles")]
    no_titles: bool,
}

impl ParamArgs {
    fn params(&self) -> AnalysisParams {
        AnalysisParams {
            n: self.n,
            granularity: self.granularity,
            min_total: self.min_count,
            percentile: self.percentile,
            similarity_scope: self.sim_scope,
            normalization: self.norm,
            include_titles: !self.no_titles,
        }
    }
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("SALIENCE_THREADS") {
        Err(_) => Ok(None),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Config(format!("SALIENCE_THREADS must be a positive integer, got `{s}`"))),
        },
    }
}

fn report(paths: &[String], dir: &Path) {
    for p in paths {
        println!("{}", dir.join(p).display());
    }
}

fn run(cli: Cli) -> Result<()> {
    let threads = threads_from_env()?;
    match cli.command {
        Command::Analyze { corpus, framework, lexicon, params, out } => {
            let config = RunConfig { corpus, framework, lexicon, out, params: params.params(), threads };
            let summary = pipeline::run_analyze(&config)?;
            report(&summary.artifacts, &summary.out);
            println!("{}", summary.out.join(pipeline::MANIFEST).display());
            if !summary.empty_topics.is_empty() {
                eprintln!("topics with no associated n-grams: {}", summary.empty_topics.join(", "));
            }
        }
        Command::Synth { spec, out } => {
            let text =
                std::fs::read_to_string(&spec).map_err(|e| Error::Io { path: spec.clone(), source: e })?;
            let corpus = generate_corpus(&SynthSpec::from_json(&text)?)?;
            let truth = corpus.write(&out)?;
            println!("{}", out.display());
            println!("{}", truth.display());
        }
        Command::Trends { corpus, params, out } => {
            let written =
                pipeline::with_threads(threads, || pipeline::run_trends(&corpus, &out, &params.params()))?;
            report(&written, &out);
        }
        Command::Similarity { corpus, framework, lexicon, params, out } => {
            let written = pipeline::with_threads(threads, || {
                pipeline::run_similarity(&corpus, &framework, lexicon.as_deref(), &out, &params.params())
            })?;
            report(&written, &out);
        }
        Command::Associate { dir, framework, params } => {
            let written = pipeline::run_associate(&dir, &framework, &params.params())?;
            report(&written, &dir);
        }
        Command::Salience { dir, framework, params } => {
            let written = pipeline::run_salience(&dir, &framework, &params.params())?;
            report(&written, &dir);
        }
        Command::Render { dir, topics, ngrams, matrices } => {
            let request = RenderRequest { topics, ngrams, matrices };
            let written = pipeline::run_render(&dir, &request)?;
            report(&written, &dir);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
