use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use cards_core::card::CardSet;
use cards_core::corpus::{extract_instances, load_corpus, load_transcripts_dir, read_jsonl, split, write_jsonl};
use cards_core::engine::GameConfig;
use cards_core::experiment::{build_vocab, feature_rows, featurize_corpus, run_experiment, ExperimentConfig, REFERENCE_F1};
use cards_core::features::{AddresseeRule, FeatureName, FeatureRow};
use cards_core::model::{evaluate, train, train_sparse, Hyperparams, LogRegModel};
use cards_core::simulator::{generate_corpus, GeneratorPolicy};
use cards_core::straights::edit_distance;
use cards_server::http::{serve, AppState};
use cards_server::ServerOptions;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cards", version, about = "Locatives as indirect requests in the Cards game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic annotated corpus.
    Simulate {
        #[arg(long)]
        games: usize,
        /// Generator policy JSON; defaults apply to missing fields.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Game config JSON; the standard board when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract and label locative instances from a directory of transcripts.
    Label {
        #[arg(long)]
        transcripts: PathBuf,
        #[arg(long, default_value_t = cards_core::corpus::DEFAULT_FOLLOWUP_WINDOW)]
        window: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a corpus and write train/test feature dumps plus the train vocabulary.
    Featurize {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, value_enum, default_value_t = Rule::Mirror)]
        addressee_rule: Rule,
    },
    /// Fit a logistic regression on a feature dump.
    Train {
        #[arg(long)]
        features: PathBuf,
        /// Comma-separated dense features, or `bigram` for the bigram baseline.
        #[arg(long, default_value = "edit_distance,explicit_goal,full_hands")]
        only: String,
        /// Vocabulary written by `featurize`; fixes the bigram dimension.
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[command(flatten)]
        hyper: HyperArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a model on a feature dump.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
    },
    /// Train and score every system on one split of a corpus.
    Experiment {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        hyper: HyperArgs,
        #[arg(long, value_enum, default_value_t = Rule::Mirror)]
        addressee_rule: Rule,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum pickups/drops to reach a winning straight.
    EditDistance {
        #[arg(long)]
        hand1: String,
        #[arg(long)]
        hand2: String,
    },
    /// Run the session server.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Default model for agent opponents.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Directory for finished-game transcripts.
        #[arg(long)]
        transcripts: Option<PathBuf>,
        /// Milliseconds between agent actions.
        #[arg(long, default_value_t = 300)]
        tick_ms: u64,
    },
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long, default_value_t = 0.8)]
    ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct HyperArgs {
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
}

impl HyperArgs {
    fn resolve(&self) -> Hyperparams {
        let d = Hyperparams::default();
        Hyperparams {
            learning_rate: self.lr.unwrap_or(d.learning_rate),
            l2_lambda: self.lambda.unwrap_or(d.l2_lambda),
            epochs: self.epochs.unwrap_or(d.epochs),
            threshold: self.threshold.unwrap_or(d.threshold),
            ..d
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Mirror,
    NotFull,
}

impl From<Rule> for AddresseeRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Mirror => AddresseeRule::Mirror,
            Rule::NotFull => AddresseeRule::NotFull,
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn simulate(games: usize, policy: Option<&Path>, config: Option<&Path>, seed: u64, out: &Path) -> Result<()> {
    let policy: GeneratorPolicy = policy.map(read_json).transpose()?.unwrap_or_default();
    let config: GameConfig = config.map(read_json).transpose()?.unwrap_or_default();
    let manifest = generate_corpus(games, &config, &policy, seed, out)?;
    let instances: usize = manifest
        .games
        .iter()
        .map(|g| read_jsonl::<serde_json::Value>(&out.join(&g.instances)).map(|v| v.len()))
        .sum::<Result<_, _>>()?;
    println!("wrote {} games with {instances} locative instances to {}", manifest.games.len(), out.display());
    Ok(())
}

fn label(dir: &Path, window: usize, out: &Path) -> Result<()> {
    if window == 0 {
        bail!("--window must be positive");
    }
    let transcripts = load_transcripts_dir(dir)?;
    let instances: Vec<_> = transcripts.iter().flat_map(|t| extract_instances(t, window)).collect();
    write_jsonl(out, &instances)?;
    let positive = instances.iter().filter(|i| i.label.is_positive()).count();
    println!("{} transcripts, {} instances ({positive} positive)", transcripts.len(), instances.len());
    Ok(())
}

fn featurize(corpus: &Path, out: &Path, s: &SplitArgs, rule: AddresseeRule) -> Result<()> {
    let (_, games) = load_corpus(corpus)?;
    let examples = featurize_corpus(&games, rule);
    let (train_set, test) = split(&examples, s.ratio, s.seed)?;
    let vocab = build_vocab(&train_set);
    write_jsonl(&out.join("train.jsonl"), &feature_rows(&train_set, &vocab))?;
    write_jsonl(&out.join("test.jsonl"), &feature_rows(&test, &vocab))?;
    write_json(&out.join("vocab.json"), &vocab.pairs())?;
    println!("{} train, {} test, {} bigrams", train_set.len(), test.len(), vocab.len());
    Ok(())
}

fn train_model(features: &Path, only: &str, vocab: Option<&Path>, hp: &Hyperparams, out: &Path) -> Result<()> {
    let rows: Vec<FeatureRow> = read_jsonl(features)?;
    let y: Vec<bool> = rows.iter().map(|r| r.label.is_positive()).collect();
    let model = if only.trim() == "bigram" {
        let dim = match vocab {
            Some(path) => read_json::<Vec<(String, String)>>(path)?.len(),
            None => rows.iter().filter_map(|r| r.sparse.keys().max()).max().map_or(0, |m| m + 1),
        };
        let x: Vec<_> = rows.iter().map(|r| r.sparse.clone()).collect();
        let mut model = train_sparse(&x, dim, &y, hp)?;
        model.vocab_ref = vocab.map(|p| p.display().to_string());
        model
    } else {
        let names = FeatureName::parse_list(only).map_err(anyhow::Error::msg)?;
        if names.is_empty() {
            bail!("--only names no features");
        }
        let x: Vec<Vec<f64>> = rows.iter().map(|r| r.dense_values(&names)).collect();
        train(&x, &y, hp)?.with_feature_names(names.iter().map(|n| n.to_string()).collect())
    };
    write_json(out, &model)?;
    println!("trained on {} rows with {} weights", rows.len(), model.weights.len());
    Ok(())
}

fn eval_model(model: &Path, features: &Path) -> Result<()> {
    let model: LogRegModel = read_json(model)?;
    let rows: Vec<FeatureRow> = read_jsonl(features)?;
    let gold: Vec<bool> = rows.iter().map(|r| r.label.is_positive()).collect();
    let dense: Option<Vec<FeatureName>> = model.feature_names.iter().map(|n| n.parse().ok()).collect();
    let preds = match dense {
        Some(names) => rows.iter().map(|r| model.predict(&r.dense_values(&names))).collect::<Result<Vec<_>, _>>()?,
        None => rows.iter().map(|r| model.predict_sparse(&r.sparse)).collect(),
    };
    println!("{}", serde_json::to_string_pretty(&evaluate(&preds, &gold)?)?);
    Ok(())
}

fn experiment(corpus: &Path, s: &SplitArgs, hp: Hyperparams, rule: AddresseeRule, out: Option<&Path>) -> Result<()> {
    let (manifest, games) = load_corpus(corpus)?;
    // A simulated corpus records the rule that produced its labels.
    let oracle = serde_json::from_value::<GeneratorPolicy>(manifest.policy).ok().map(|p| p.followup_rule);
    let examples = featurize_corpus(&games, rule);
    let cfg = ExperimentConfig { split_ratio: s.ratio, seed: s.seed, hyperparams: hp, oracle };
    let report = run_experiment(&examples, &cfg)?;
    println!(
        "train {} test {} (train positive rate {:.3})",
        report.n_train, report.n_test, report.train_positive_rate
    );
    println!("{:<26} {:>6} {:>6} {:>6} {:>10}", "system", "P", "R", "F1", "reference");
    for r in &report.results {
        let reference = REFERENCE_F1
            .iter()
            .find(|(name, _)| *name == r.system)
            .map_or(String::from("-"), |(_, f)| format!("{f:.1}"));
        println!(
            "{:<26} {:>6.1} {:>6.1} {:>6.1} {:>10}",
            r.system,
            100.0 * r.report.precision,
            100.0 * r.report.recall,
            100.0 * r.report.f1,
            reference
        );
    }
    if let Some(path) = out {
        write_json(path, &report)?;
    }
    Ok(())
}

fn edit(hand1: &str, hand2: &str) -> Result<()> {
    let h1 = CardSet::parse_list(hand1).with_context(|| format!("--hand1 {hand1:?}"))?;
    let h2 = CardSet::parse_list(hand2).with_context(|| format!("--hand2 {hand2:?}"))?;
    let r = edit_distance(h1, h2, None)?;
    let straights: Vec<String> = r.optimal_straights.iter().map(|s| s.to_string()).collect();
    println!("cost {}", r.cost);
    println!("optimal {}", straights.join(" "));
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate { games, policy, config, seed, out } => {
            simulate(games, policy.as_deref(), config.as_deref(), seed, &out)
        }
        Command::Label { transcripts, window, out } => label(&transcripts, window, &out),
        Command::Featurize { corpus, out, split, addressee_rule } => {
            featurize(&corpus, &out, &split, addressee_rule.into())
        }
        Command::Train { features, only, vocab, hyper, out } => {
            train_model(&features, &only, vocab.as_deref(), &hyper.resolve(), &out)
        }
        Command::Eval { model, features } => eval_model(&model, &features),
        Command::Experiment { corpus, split, hyper, addressee_rule, out } => {
            experiment(&corpus, &split, hyper.resolve(), addressee_rule.into(), out.as_deref())
        }
        Command::EditDistance { hand1, hand2 } => edit(&hand1, &hand2),
        Command::Serve { addr, model, transcripts, tick_ms } => {
            if let Some(m) = &model {
                read_json::<LogRegModel>(m)?;
            }
            let options = ServerOptions { default_model: model, transcript_dir: transcripts };
            let state = AppState::new(options, Duration::from_millis(tick_ms));
            let runtime = tokio::runtime::Runtime::new()?;
            println!("listening on http://{addr}");
            runtime.block_on(serve(addr, state))?;
            Ok(())
        }
    }
}
