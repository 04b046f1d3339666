//! `dsm`: build, weight, reduce and evaluate count-based distributional models.
//!
//! Exit codes: 0 success, 1 fatal error, 2 vocabulary-coverage failure.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use dsm_core::config::{check_fingerprint, stage_fingerprint, PipelineConfig, FINGERPRINT_KEY};
use dsm_core::container::{self, AnyModel};
use dsm_core::cooccur::{build_from_files, CountOptions, TargetSpec};
use dsm_core::corpus::TagMap;
use dsm_core::eval::{self, DatasetFormat, EvalSummary};
use dsm_core::similarity::{nearest_neighbors, pair_similarity, SimParams, Space};
use dsm_core::svd::{truncated_svd, SvdOptions};
use dsm_core::{analysis, weighting, Error, Word};

#[derive(Parser)]
#[command(name = "dsm", version, about = "Count-based distributional semantic models")]
struct Cli {
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

/// Pipeline settings; flags override values read from `--config`.
#[derive(Args, Clone, Default)]
struct Settings {
    /// Flat key = value config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    window: Option<String>,
    /// filtered | surface
    #[arg(long, global = true)]
    window_over: Option<String>,
    #[arg(long, global = true)]
    min_context_freq: Option<String>,
    /// raw | ppmi | lmi
    #[arg(long, global = true)]
    scheme: Option<String>,
    #[arg(long, global = true)]
    k: Option<String>,
    /// Singular-value exponent: 0, 0.5 or 1.
    #[arg(long, global = true)]
    p: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    dense_cutoff: Option<String>,
    /// cosine | apsyn
    #[arg(long, global = true)]
    measure: Option<String>,
    #[arg(long, global = true)]
    apsyn_n: Option<String>,
    /// One target word per line (`lemma_P` or bare lemma).
    #[arg(long, global = true)]
    targets: Option<String>,
    /// Corpus tag map (`TAG=POS` lines).
    #[arg(long, global = true)]
    tagmap: Option<String>,
    /// noun-first | verb-first | adjective-first
    #[arg(long, global = true)]
    pos_policy: Option<String>,
    /// skip | zero
    #[arg(long, global = true)]
    oov_policy: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Count co-occurrences in POS-tagged corpus files.
    Build {
        /// Corpus files (plain or gzip); defaults to `corpus` from the config.
        corpus: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Weight a count model with raw, PPMI or LMI.
    Weight {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Reduce a weighted model to k dimensions.
    Svd {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print the similarity of two words.
    Sim { model: PathBuf, word1: String, word2: String },
    /// Print the nearest neighbors of a word as CSV.
    Neighbors {
        model: PathBuf,
        word: String,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Correlate model scores with a benchmark.
    Eval {
        model: PathBuf,
        dataset: PathBuf,
        /// ws353 | men | men-natural | simlex
        #[arg(long)]
        format: String,
        /// Per-pair CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Frequency rank of the top-K neighbors of each query word.
    Hubness(HubnessArgs),
}

#[derive(Args)]
struct HubnessArgs {
    model: PathBuf,
    /// Query words, one per line, or a benchmark file when `--format` is given.
    queries: PathBuf,
    #[arg(long)]
    format: Option<String>,
    #[arg(short = 'K', long = "top", default_value_t = 1000)]
    top: usize,
    /// `query,nn_rank,neighbor,freq_rank,score`
    #[arg(long)]
    out: PathBuf,
    /// `nn_rank,mean_freq_rank,n`
    #[arg(long)]
    summary: Option<PathBuf>,
}

impl Settings {
    fn resolve(&self) -> anyhow::Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::from_file(p)?,
            None => PipelineConfig::default(),
        };
        let overrides = [
            ("window", &self.window),
            ("window_over", &self.window_over),
            ("min_context_freq", &self.min_context_freq),
            ("scheme", &self.scheme),
            ("k", &self.k),
            ("p", &self.p),
            ("seed", &self.seed),
            ("dense_cutoff", &self.dense_cutoff),
            ("measure", &self.measure),
            ("apsyn_n", &self.apsyn_n),
            ("targets", &self.targets),
            ("tagmap", &self.tagmap),
            ("pos_policy", &self.pos_policy),
            ("oov_policy", &self.oov_policy),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v).with_context(|| format!("--{}", key.replace('_', "-")))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn stored_fingerprint(prov: &BTreeMap<String, String>) -> String {
    prov.get(FINGERPRINT_KEY).cloned().unwrap_or_else(|| "none".into())
}

/// With `--config`, the input must carry the fingerprint the config predicts.
fn check_input(settings: &Settings, prov: &BTreeMap<String, String>, expected: impl FnOnce() -> String, path: &Path) -> anyhow::Result<()> {
    if settings.config.is_some() {
        check_fingerprint(prov, &expected()).with_context(|| format!("{} does not match --config", path.display()))?;
    }
    Ok(())
}

fn stamp(prov: &mut BTreeMap<String, String>, stage: &str, fp: &str) {
    prov.insert(FINGERPRINT_KEY.into(), fp.into());
    prov.insert(format!("{stage}_fingerprint"), fp.into());
}

fn cmd_build(cfg: &PipelineConfig, corpus: Vec<PathBuf>, output: &Path) -> anyhow::Result<()> {
    let mut cfg = cfg.clone();
    if !corpus.is_empty() {
        cfg.corpus = corpus;
    }
    if cfg.corpus.is_empty() {
        bail!("no corpus files given");
    }
    let tagmap = match &cfg.tagmap {
        Some(p) => TagMap::from_file(p)?,
        None => TagMap::default(),
    };
    let targets = match &cfg.targets {
        Some(p) => TargetSpec::from_file(p)?,
        None => TargetSpec::All,
    };
    let mut opts = CountOptions::new(cfg.window as usize);
    opts.window_over = cfg.window_over;
    let mut m = build_from_files(&cfg.corpus, &tagmap, cfg.min_context_freq, &opts, &targets)?;
    let fp = cfg.build_fingerprint();
    stamp(&mut m.provenance, "build", &fp);
    container::save_counts(&m, output)?;
    println!(
        "rows={} cols={} nnz={} total={} fingerprint={fp}",
        m.rows().len(),
        m.cols().len(),
        m.nnz(),
        m.total()
    );
    Ok(())
}

fn cmd_weight(settings: &Settings, cfg: &PipelineConfig, input: &Path, output: &Path) -> anyhow::Result<()> {
    let counts = container::load_counts(input)?;
    check_input(settings, &counts.provenance, || cfg.build_fingerprint(), input)?;
    let mut w = weighting::apply(&counts, cfg.scheme);
    let fp = stage_fingerprint("weight", Some(&stored_fingerprint(&counts.provenance)), &cfg.weight_entries());
    stamp(&mut w.provenance, "weight", &fp);
    container::save_weighted(&w, output)?;
    println!("scheme={} nnz={} fingerprint={fp}", cfg.scheme, w.nnz());
    Ok(())
}

fn cmd_svd(settings: &Settings, cfg: &PipelineConfig, input: &Path, output: &Path) -> anyhow::Result<()> {
    let w = container::load_weighted(input)?;
    check_input(settings, &w.provenance, || cfg.weight_fingerprint(), input)?;
    let mut opts = SvdOptions::new(cfg.k, cfg.seed);
    opts.eigen_weight = cfg.p;
    opts.dense_cutoff = cfg.dense_cutoff;
    let mut d = truncated_svd(&w, &opts)?;
    let fp = stage_fingerprint("svd", Some(&stored_fingerprint(&w.provenance)), &cfg.svd_entries());
    stamp(&mut d.provenance, "svd", &fp);
    container::save_dense(&d, output)?;
    println!("k={} p={} fingerprint={fp}", d.k(), cfg.p);
    Ok(())
}

fn load_space(settings: &Settings, cfg: &PipelineConfig, path: &Path) -> anyhow::Result<(Space, String)> {
    let model = container::load_any(path)?;
    check_input(settings, model.provenance(), || cfg.model_fingerprint(), path)?;
    let fp = stored_fingerprint(model.provenance());
    if let AnyModel::Counts(_) = model {
        log::info!("{}: count model, scoring raw co-occurrence counts", path.display());
    }
    Ok((Space::from(model), fp))
}

/// `lemma_P`, or a bare lemma resolved by the POS policy.
fn parse_word(space: &Space, cfg: &PipelineConfig, raw: &str) -> Result<Word, Error> {
    if let Ok(w) = raw.parse::<Word>() {
        return Ok(w);
    }
    let lemma = raw.to_lowercase();
    match cfg.pos_policy.resolve(space, &lemma) {
        Some(p) => Ok(Word::new(lemma, p)),
        None => Err(Error::OutOfVocabulary(Word::new(lemma, cfg.pos_policy.order[0]))),
    }
}

fn params(cfg: &PipelineConfig) -> SimParams {
    SimParams { apsyn_n: cfg.apsyn_n }
}

fn query_fingerprint(model_fp: &str, cfg: &PipelineConfig, extra: &[(&str, String)]) -> (String, BTreeMap<String, String>) {
    let mut entries = cfg.query_entries();
    for (k, v) in extra {
        entries.insert((*k).into(), v.clone());
    }
    (stage_fingerprint("query", Some(model_fp), &entries), entries)
}

fn cmd_sim(settings: &Settings, cfg: &PipelineConfig, model: &Path, w1: &str, w2: &str) -> anyhow::Result<()> {
    let (space, _) = load_space(settings, cfg, model)?;
    let a = parse_word(&space, cfg, w1)?;
    let b = parse_word(&space, cfg, w2)?;
    let s = pair_similarity(&space, &a, &b, cfg.measure, &params(cfg))?;
    println!("{a}\t{b}\t{}\t{:.6}", cfg.measure, s.value);
    Ok(())
}

fn cmd_neighbors(settings: &Settings, cfg: &PipelineConfig, model: &Path, word: &str, top: usize) -> anyhow::Result<()> {
    let (space, _) = load_space(settings, cfg, model)?;
    let w = parse_word(&space, cfg, word)?;
    let ns = nearest_neighbors(&space, &w, top, cfg.measure, &params(cfg))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "rank,neighbor,score")?;
    for (i, n) in ns.iter().enumerate() {
        writeln!(out, "{},{},{}", i + 1, n.word, n.score)?;
    }
    Ok(())
}

fn cmd_eval(
    settings: &Settings,
    cfg: &PipelineConfig,
    model: &Path,
    dataset: &Path,
    format: &str,
    out: Option<&Path>,
    summary: Option<&Path>,
) -> anyhow::Result<()> {
    let (space, model_fp) = load_space(settings, cfg, model)?;
    let format: DatasetFormat = format.parse()?;
    let ds = eval::load_dataset(dataset, format)?;
    let result = eval::evaluate(&space, &ds, cfg.measure, &params(cfg), &cfg.pos_policy, cfg.oov_policy)?;
    let (fp, mut entries) = query_fingerprint(
        &model_fp,
        cfg,
        &[("dataset", ds.name.clone()), ("format", format.to_string())],
    );
    entries.insert("model_fingerprint".into(), model_fp);
    if let Some(p) = out {
        eval::write_results_csv(&result, &fp, p)?;
    }
    let s = EvalSummary::new(&result, &fp, entries);
    if let Some(p) = summary {
        s.write_json(p)?;
    }
    println!(
        "{}\t{}\trho={:.4}\tscored={}\tskipped={}\tcoverage={:.4}",
        s.dataset, s.measure, s.rho, s.n_scored, s.n_skipped, s.coverage
    );
    Ok(())
}

fn read_queries(space: &Space, cfg: &PipelineConfig, path: &Path, format: Option<&str>) -> anyhow::Result<Vec<Word>> {
    let mut words = Vec::new();
    if let Some(f) = format {
        let ds = eval::load_dataset(path, f.parse()?)?;
        for (lemma, pos) in ds.words() {
            match pos.or_else(|| cfg.pos_policy.resolve(space, &lemma)) {
                Some(p) => words.push(Word::new(lemma, p)),
                None => words.push(Word::new(lemma, cfg.pos_policy.order[0])),
            }
        }
        words.dedup();
        return Ok(words);
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        match parse_word(space, cfg, line) {
            Ok(w) => words.push(w),
            Err(Error::OutOfVocabulary(w)) => words.push(w),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(words)
}

fn cmd_hubness(settings: &Settings, cfg: &PipelineConfig, args: &HubnessArgs) -> anyhow::Result<()> {
    let (space, model_fp) = load_space(settings, cfg, &args.model)?;
    let qs = read_queries(&space, cfg, &args.queries, args.format.as_deref())?;
    let profile = analysis::hubness_profile(&space, &qs, args.top, cfg.measure, &params(cfg))?;
    let (fp, _) = query_fingerprint(&model_fp, cfg, &[("K", args.top.to_string())]);
    analysis::write_points_csv(&profile, &fp, &args.out)?;
    if let Some(p) = &args.summary {
        analysis::write_summary_csv(&profile, &fp, p)?;
    }
    if !profile.skipped.is_empty() {
        log::warn!("{} of {} queries have no vector", profile.skipped.len(), profile.n_queries);
    }
    println!(
        "queries={} skipped={} points={}",
        profile.n_queries,
        profile.skipped.len(),
        profile.points.len()
    );
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let settings = &cli.settings;
    let cfg = settings.resolve()?;
    match cli.command {
        Command::Build { corpus, output } => cmd_build(&cfg, corpus, &output),
        Command::Weight { input, output } => cmd_weight(settings, &cfg, &input, &output),
        Command::Svd { input, output } => cmd_svd(settings, &cfg, &input, &output),
        Command::Sim { model, word1, word2 } => cmd_sim(settings, &cfg, &model, &word1, &word2),
        Command::Neighbors { model, word, top } => cmd_neighbors(settings, &cfg, &model, &word, top),
        Command::Eval {
            model,
            dataset,
            format,
            out,
            summary,
        } => cmd_eval(settings, &cfg, &model, &dataset, &format, out.as_deref(), summary.as_deref()),
        Command::Hubness(args) => cmd_hubness(settings, &cfg, &args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let coverage = e.chain().any(|c| c.downcast_ref::<Error>().is_some_and(Error::is_coverage));
            ExitCode::from(if coverage { 2 } else { 1 })
        }
    }
}
