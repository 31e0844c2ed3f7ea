//! `causet` — the event causality detection pipeline as subcommands.
//!
//! Every subcommand is a thin shell over `causet::pipeline`; semantics are
//! identical when called as a library. Exit codes: 0 success, 1 usage or
//! configuration error, 2 data error, 3 internal error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use causet::evaluation::SplitSpec;
use causet::extraction::CueLexicon;
use causet::ffnn::TrainConfig;
use causet::pipeline::{
    self, BaselineMethod, ExitClass, PipelineConfig, PipelineError, QueryDirection,
};

#[derive(Parser)]
#[command(
    name = "causet",
    version,
    about = "Detect causal event pairs in short text"
)]
struct Cli {
    /// Log level: off, error, warn, info, debug, trace.
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean raw tweets into declarative sentences.
    Preprocess {
        /// Tweet file: one tweet per line, optionally `id<TAB>text`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output TSV of (source_id, index, text) rows.
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract candidate cause/effect event pairs from clean sentences.
    ExtractPairs {
        /// Sentence TSV produced by `preprocess`.
        #[arg(long)]
        sentences: PathBuf,
        /// Dependency parses of the candidate phrases (10-column format).
        #[arg(long)]
        parses: PathBuf,
        /// Cue lexicon TSV; defaults to the built-in lexicon.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Output pair TSV.
        #[arg(long)]
        out: PathBuf,
        /// Also write phrases that lacked a parse, one per line.
        #[arg(long)]
        missing_phrases: Option<PathBuf>,
    },
    /// Build the causal token network from a news corpus.
    BuildNetwork {
        /// Line-delimited news corpus with id/title/content records.
        #[arg(long)]
        news: PathBuf,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Output network container.
        #[arg(long)]
        out: PathBuf,
    },
    /// Query neighbors of a token in a serialized network.
    #[command(group(ArgGroup::new("direction").required(true).args(["causal_of", "effects_of"])))]
    QueryNetwork {
        #[arg(long)]
        net: PathBuf,
        /// List tokens observed as causes of this token.
        #[arg(long)]
        causal_of: Option<String>,
        /// List tokens observed as effects of this token.
        #[arg(long)]
        effects_of: Option<String>,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Extend event context words with network neighbors.
    Extend {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        net: PathBuf,
        /// Number of context words to add per event.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert extended pairs into mean-pooled feature vectors.
    Featurize {
        #[arg(long)]
        extended: PathBuf,
        /// Embedding text file ("count dim" header, token rows).
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the feed-forward classifier on labeled features.
    Train {
        #[arg(long)]
        features: PathBuf,
        /// Fraction of each class held out for validation.
        #[arg(long, default_value_t = 0.5)]
        val_fraction: f64,
        #[arg(long, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 40)]
        batch: usize,
        #[arg(long, default_value_t = 150)]
        epochs: usize,
        #[arg(long, default_value_t = 0.95)]
        rho: f64,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output model container.
        #[arg(long)]
        out: PathBuf,
        /// Per-epoch history CSV.
        #[arg(long)]
        history: PathBuf,
    },
    /// Score features with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Output predictions TSV (pair_id, probability, label).
        #[arg(long)]
        out: PathBuf,
    },
    /// Score pairs with a comparison baseline.
    Baseline {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Network file (co-occurrence method).
        #[arg(long)]
        net: Option<PathBuf>,
        /// Event-sequence counts file (causal-potential method).
        #[arg(long)]
        counts: Option<PathBuf>,
        #[arg(long)]
        pairs: PathBuf,
        /// Decision threshold.
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare predictions against gold annotations.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// JSON report with metrics, confusion counts and ROC points.
        #[arg(long)]
        out: PathBuf,
    },
    /// Stratified train/validation/test split of an annotation file.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.6)]
        train_fraction: f64,
        #[arg(long, default_value_t = 0.5)]
        val_fraction: f64,
        /// Prefix for train.tsv / validation.tsv / test.tsv.
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Run the end-to-end experiment over the extension sweep.
    RunExperiment {
        /// Flat key=value config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override one config key, repeatable: --set seed=7
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Print the stage plan and exit without executing.
        #[arg(long)]
        dry_run: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Causal potential over event-sequence counts.
    Cp,
    /// Co-occurrence strength over the causal network.
    Cooccurrence,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with success intent.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .format_timestamp_millis()
        .init();

    match std::panic::catch_unwind(move || run(cli.command)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            match e.exit_class() {
                ExitClass::Usage => ExitCode::from(1),
                ExitClass::Data => ExitCode::from(2),
                ExitClass::Internal => ExitCode::from(3),
            }
        }
        Err(_) => {
            // The panic hook has already written the message.
            eprintln!("error: internal failure");
            ExitCode::from(3)
        }
    }
}

fn load_lexicon(path: &Option<PathBuf>) -> Result<CueLexicon, PipelineError> {
    match path {
        Some(p) => Ok(CueLexicon::from_file(p)?),
        None => Ok(CueLexicon::shipped().clone()),
    }
}

fn run(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Preprocess { input, out } => {
            let stats = pipeline::preprocess_file(&input, &out)?;
            println!(
                "{} tweets -> {} clean sentences",
                stats.tweets, stats.sentences
            );
        }
        Command::ExtractPairs {
            sentences,
            parses,
            lexicon,
            out,
            missing_phrases,
        } => {
            let lexicon = load_lexicon(&lexicon)?;
            let stats = pipeline::extract_pairs_file(
                &sentences,
                &parses,
                &lexicon,
                &out,
                missing_phrases.as_deref(),
            )?;
            println!(
                "{} sentences -> {} pairs ({} no cue, {} missing parse, {} unextractable)",
                stats.sentences,
                stats.pairs,
                stats.no_cue,
                stats.missing_parse,
                stats.unextractable
            );
        }
        Command::BuildNetwork { news, lexicon, out } => {
            let lexicon = load_lexicon(&lexicon)?;
            let (stats, net) = pipeline::build_network_file(&news, &lexicon, &out)?;
            println!(
                "{} articles, {} sentences, {} cue hits -> {} nodes, {} edges",
                stats.articles,
                stats.sentences,
                stats.cue_hits,
                net.node_count(),
                net.edge_count()
            );
        }
        Command::QueryNetwork {
            net,
            causal_of,
            effects_of,
            top,
        } => {
            let (token, direction) = match (&causal_of, &effects_of) {
                (Some(t), None) => (t.clone(), QueryDirection::CausesOf),
                (None, Some(t)) => (t.clone(), QueryDirection::EffectsOf),
                _ => unreachable!("clap group enforces exactly one"),
            };
            let ranked = pipeline::query_network_file(&net, &token, direction, top)?;
            for (neighbor, freq) in ranked {
                println!("{neighbor}\t{freq}");
            }
        }
        Command::Extend { pairs, net, n, out } => {
            let count = pipeline::extend_file(&pairs, &net, n, &out)?;
            println!("{count} pairs extended with n={n}");
        }
        Command::Featurize {
            extended,
            embeddings,
            out,
        } => {
            let count = pipeline::featurize_file(&extended, &embeddings, &out)?;
            println!("{count} pairs featurized");
        }
        Command::Train {
            features,
            val_fraction,
            lr,
            batch,
            epochs,
            rho,
            epsilon,
            threshold,
            seed,
            out,
            history,
        } => {
            let config = TrainConfig {
                learning_rate: lr,
                batch_size: batch,
                epochs,
                decay_rho: rho,
                epsilon,
                threshold,
                seed,
            };
            let summary = pipeline::train_file(&features, val_fraction, &config, &out, &history)?;
            match summary.final_val_accuracy {
                Some(val) => println!(
                    "trained on {} rows (val {}): train acc {:.4}, val acc {:.4}",
                    summary.learn_rows, summary.val_rows, summary.final_train_accuracy, val
                ),
                None => println!(
                    "trained on {} rows: train acc {:.4}",
                    summary.learn_rows, summary.final_train_accuracy
                ),
            }
        }
        Command::Predict {
            model,
            features,
            threshold,
            out,
        } => {
            let count = pipeline::predict_file(&model, &features, threshold, &out)?;
            println!("{count} pairs scored");
        }
        Command::Baseline {
            method,
            net,
            counts,
            pairs,
            theta,
            out,
        } => {
            let method = match method {
                MethodArg::Cp => BaselineMethod::CausalPotential,
                MethodArg::Cooccurrence => BaselineMethod::Cooccurrence,
            };
            let count = pipeline::baseline_file(
                method,
                net.as_deref(),
                counts.as_deref(),
                &pairs,
                theta,
                &out,
            )?;
            println!("{count} pairs scored");
        }
        Command::Evaluate { pred, gold, out } => {
            let report = pipeline::evaluate_files(&pred, &gold, Some(&out))?;
            let m = &report.metrics;
            println!(
                "accuracy {:.4}  precision {:.4}  recall {:.4}  f1 {:.4}  auc {:.4}",
                m.accuracy, m.precision, m.recall, m.f1, report.roc.auc
            );
        }
        Command::Split {
            input,
            seed,
            train_fraction,
            val_fraction,
            out_prefix,
        } => {
            let spec = SplitSpec {
                train_fraction,
                val_fraction_of_train: val_fraction,
                seed,
            };
            let (train, val, test) = pipeline::split_file(&input, &spec, &out_prefix)?;
            println!("split: {train} train, {val} validation, {test} test");
        }
        Command::RunExperiment {
            config,
            overrides,
            dry_run,
        } => {
            let mut cfg = match config {
                Some(path) => PipelineConfig::from_file(&path)?,
                None => PipelineConfig::default(),
            };
            for pair in &overrides {
                let (key, value) = pair.split_once('=').ok_or_else(|| PipelineError::Config {
                    field: pair.clone(),
                    reason: "expected KEY=VALUE".into(),
                })?;
                cfg.set(key.trim(), value.trim())?;
            }
            cfg.apply_env_overrides();
            if dry_run {
                for stage in pipeline::dry_run(&cfg)? {
                    println!("{}", stage.stage);
                    for input in &stage.inputs {
                        println!("  in:  {input}");
                    }
                    for output in &stage.outputs {
                        println!("  out: {output}");
                    }
                }
                return Ok(());
            }
            let report = pipeline::run_experiment(&cfg)?;
            println!("n\taccuracy\tprecision\trecall\tf1\tauc");
            for row in &report.rows {
                match (&row.result, &row.error) {
                    (Some(r), _) => println!(
                        "{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
                        row.n, r.accuracy, r.precision, r.recall, r.f1, r.auc
                    ),
                    (None, Some(e)) => println!("{}\tfailed: {e}", row.n),
                    (None, None) => {}
                }
            }
        }
    }
    Ok(())
}
