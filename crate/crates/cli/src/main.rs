//! `causeway`: bivariate causal direction discovery from the command
//! line — decide one pair, benchmark a dataset against ground truth, or
//! generate a synthetic suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 unusable data, 3 empty
//! result set.

mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use causeway_core::bootstrap::p_cause;
use causeway_core::criteria::{decide_methods, Method};
use causeway_core::dataset::{load_dataset, parse_metadata, parse_pair_file, PairSample};
use causeway_core::ensemble::vote_scores;
use causeway_core::pipeline::{analyze_dataset, AnalysisConfig};
use causeway_core::synth::{
    generate_suite_with, metadata_line, pair_file_text, CauseDist, Mechanism, SuiteConfig,
};
use causeway_core::Error as CoreError;

use report::{summarize, Report, RunConfig};

/// Significance bound of the correlation filter (|r| must clear
/// `--min-abs-r` AND the p-value must be below this).
const MAX_P: f64 = 0.05;

#[derive(Parser)]
#[command(
    name = "causeway",
    version,
    about = "Bivariate causal direction discovery: kernel-regression criteria, \
             majority ensemble, bootstrap certainty"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by `decide` and `bench`.
#[derive(Args, Clone)]
struct MethodOpts {
    /// Voting methods, comma-separated subset of M1,M2,M3,M4
    #[arg(long, value_delimiter = ',', default_value = "M1,M2,M3,M4", value_parser = parse_method)]
    methods: Vec<Method>,
    /// Method whose vote breaks exact vote ties
    #[arg(long, default_value = "M2", value_parser = parse_method)]
    leader: Method,
    /// Bootstrap resamples behind each p_cause value
    #[arg(long, default_value_t = 10)]
    boot_iters: u32,
    /// Master seed; every random stage derives its stream from (seed, pair id)
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the causal direction of one two-column pair file
    Decide {
        /// Whitespace-separated numeric file with exactly two columns
        pair_file: PathBuf,
        #[command(flatten)]
        opts: MethodOpts,
    },
    /// Benchmark a pair directory against its metadata ground truth
    Bench {
        /// Directory holding the pair files (`<id>.txt` or `pair<id>.txt`)
        #[arg(long)]
        data_dir: PathBuf,
        /// Metadata file: `pair_id cause_first cause_last effect_first effect_last weight`
        #[arg(long)]
        meta: PathBuf,
        /// Restrict the run to the pair ids listed in this file (one per
        /// line, `#` comments allowed)
        #[arg(long)]
        include: Option<PathBuf>,
        #[command(flatten)]
        opts: MethodOpts,
        /// Certainty threshold of the filtered summary (inclusive)
        #[arg(long, default_value_t = 0.9)]
        pcause_min: f64,
        /// |Pearson r| bound of the correlation-filtered summary (exclusive)
        #[arg(long, default_value_t = 0.1)]
        min_abs_r: f64,
        /// Keep only the first N observations of each pair
        #[arg(long)]
        max_n: Option<usize>,
        /// Report format: a set of CSV tables or one JSON object
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Directory the report files are written into
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic additive-noise suite with known ground truth
    Synth {
        /// Pairs to generate (every second pair is column-swapped, so
        /// both ground-truth classes appear)
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Observations per pair
        #[arg(long, default_value_t = 500)]
        n: usize,
        /// Noise standard deviation
        #[arg(long, default_value_t = 0.2)]
        noise_sd: f64,
        /// Mechanisms cycled over the suite, comma-separated
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "cubic,sigmoid,quadratic,piecewise",
            value_parser = parse_mechanism
        )]
        mechanisms: Vec<Mechanism>,
        /// Distribution of the cause variable (uniform | gaussian)
        #[arg(long, default_value = "uniform", value_parser = parse_cause_dist)]
        cause_dist: CauseDist,
        /// Suite seed
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Directory the pair files and pairmeta.txt are written into
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

fn parse_mechanism(s: &str) -> Result<Mechanism, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

fn parse_cause_dist(s: &str) -> Result<CauseDist, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

/// A command failure carrying its exit code.
enum Failure {
    /// The invocation itself is wrong (bad flag value, unreadable path,
    /// leader outside the method set). Exit 1.
    Usage(String),
    /// The referenced data cannot be analyzed (unparsable file,
    /// constant column, too few rows). Exit 2.
    Data(String),
    /// Nothing left to report after loading and filtering. Exit 3.
    Empty(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Empty(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Empty(m) => m,
        }
    }
}

/// Library errors signal bad data, except configuration complaints,
/// which are the caller's fault.
fn data_error(err: CoreError) -> Failure {
    match err {
        CoreError::Config(_) => Failure::Usage(err.to_string()),
        other => Failure::Data(other.to_string()),
    }
}

fn unreadable(path: &Path, err: &std::io::Error) -> Failure {
    Failure::Usage(format!("cannot read {}: {err}", path.display()))
}

fn main() {
    // Rust ignores SIGPIPE, so writes to a pipe closed by a downstream
    // reader (e.g. `causeway bench ... | head`) would panic on EPIPE with
    // exit code 101. Restore the default disposition so the process dies
    // quietly like any other Unix filter; spec'd exit codes stay intact
    // whenever output is actually deliverable.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                err.exit();
            }
            eprint!("{err}");
            std::process::exit(1);
        }
    };
    let result = match cli.command {
        Command::Decide { pair_file, opts } => cmd_decide(&pair_file, &opts),
        Command::Bench {
            data_dir,
            meta,
            include,
            opts,
            pcause_min,
            min_abs_r,
            max_n,
            format,
            out,
        } => cmd_bench(BenchArgs {
            data_dir,
            meta,
            include,
            opts,
            pcause_min,
            min_abs_r,
            max_n,
            format,
            out,
        }),
        Command::Synth { count, n, noise_sd, mechanisms, cause_dist, seed, out } => {
            cmd_synth(count, n, noise_sd, mechanisms, cause_dist, seed, &out)
        }
    };
    if let Err(failure) = result {
        eprintln!("error: {}", failure.message());
        std::process::exit(failure.code());
    }
}

/// Deduplicated analysis configuration, validated before any work runs.
fn analysis_config(opts: &MethodOpts) -> Result<AnalysisConfig, Failure> {
    let mut methods = Vec::new();
    for &m in &opts.methods {
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    let config = AnalysisConfig {
        methods,
        leader: opts.leader,
        bootstrap_iterations: opts.boot_iters,
        seed: opts.seed,
    };
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(config)
}

fn cmd_decide(pair_file: &Path, opts: &MethodOpts) -> Result<(), Failure> {
    let config = analysis_config(opts)?;
    let text = fs::read_to_string(pair_file).map_err(|e| unreadable(pair_file, &e))?;
    let rows = parse_pair_file(&text).map_err(data_error)?;
    let width = rows.first().map_or(0, Vec::len);
    if width != 2 {
        return Err(Failure::Data(format!(
            "{}: need exactly 2 columns, found {width}",
            pair_file.display()
        )));
    }
    let id = pair_file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "pair".to_string());
    let x: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let y: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let pair = PairSample::new(id, x, y, None, 1.0).map_err(data_error)?;
    let scores = decide_methods(&pair, &config.methods).map_err(data_error)?;
    let ensemble = vote_scores(&scores, config.leader).map_err(data_error)?;
    let certainty = p_cause(
        &pair,
        &config.methods,
        config.leader,
        config.bootstrap_iterations,
        config.seed,
    )
    .map_err(data_error)?;

    println!("pair {} (n = {})", pair.id, pair.len());
    println!(
        "{:<8} {:>14} {:>14}  {:<5} decision",
        "method", "score_x->y", "score_y->x", "tie"
    );
    for s in &scores {
        println!(
            "{:<8} {:>14.6} {:>14.6}  {:<5} {}",
            s.method.label(),
            s.score_xy,
            s.score_yx,
            s.tie,
            s.decision
        );
    }
    let mut notes = Vec::new();
    if ensemble.unanimous {
        notes.push("unanimous".to_string());
    }
    if ensemble.leader_used {
        notes.push(format!("leader {} decided the tie", ensemble.leader.label()));
    }
    let note = if notes.is_empty() { String::new() } else { format!("; {}", notes.join(", ")) };
    println!(
        "ensemble: {} (votes {}-{}{note})",
        ensemble.decision, ensemble.votes_xy, ensemble.votes_yx
    );
    println!(
        "p_cause: {} ({} resamples, seed {})",
        certainty.p_cause, certainty.iterations, certainty.seed
    );
    Ok(())
}

struct BenchArgs {
    data_dir: PathBuf,
    meta: PathBuf,
    include: Option<PathBuf>,
    opts: MethodOpts,
    pcause_min: f64,
    min_abs_r: f64,
    max_n: Option<usize>,
    format: Format,
    out: PathBuf,
}

/// `<id>.txt` first; the common published layout prefixes `pair`.
fn find_pair_file(dir: &Path, id: &str) -> Option<PathBuf> {
    [format!("{id}.txt"), format!("pair{id}.txt")]
        .into_iter()
        .map(|name| dir.join(name))
        .find(|p| p.is_file())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let config = analysis_config(&args.opts)?;
    for (flag, value) in [("--pcause-min", args.pcause_min), ("--min-abs-r", args.min_abs_r)] {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Failure::Usage(format!("{flag} must be in [0, 1], got {value}")));
        }
    }
    if let Some(cap) = args.max_n {
        if cap < 3 {
            return Err(Failure::Usage(format!("--max-n must be at least 3, got {cap}")));
        }
    }

    let meta_text = fs::read_to_string(&args.meta).map_err(|e| unreadable(&args.meta, &e))?;
    let mut metadata = parse_metadata(&meta_text).map_err(data_error)?;
    if let Some(include) = &args.include {
        let text = fs::read_to_string(include).map_err(|e| unreadable(include, &e))?;
        let wanted: BTreeSet<&str> = text
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty() && !line.starts_with('#'))
            .collect();
        metadata.retain(|m| wanted.contains(m.pair_id.as_str()));
    }
    if metadata.is_empty() {
        return Err(Failure::Empty(
            "no pairs selected: metadata is empty after the include filter".to_string(),
        ));
    }

    let mut texts = BTreeMap::new();
    for m in &metadata {
        let path = find_pair_file(&args.data_dir, &m.pair_id).ok_or_else(|| {
            Failure::Data(format!(
                "missing pair file for `{}` in {}",
                m.pair_id,
                args.data_dir.display()
            ))
        })?;
        let text =
            fs::read_to_string(&path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        texts.insert(m.pair_id.clone(), text);
    }

    let loaded = load_dataset(&texts, &metadata).map_err(data_error)?;
    let mut skipped = loaded.skipped;
    let samples: Vec<PairSample> = match args.max_n {
        Some(cap) => loaded.samples.iter().map(|s| s.truncated(cap)).collect(),
        None => loaded.samples,
    };
    if samples.is_empty() {
        return Err(Failure::Empty(format!(
            "no analyzable pairs; {} skipped by the exclusion rules",
            skipped.len()
        )));
    }

    let outcome = analyze_dataset(&samples, &config).map_err(data_error)?;
    skipped.extend(outcome.skipped);
    skipped.sort_by(|a, b| a.id.cmp(&b.id));
    if outcome.records.is_empty() {
        return Err(Failure::Empty(format!(
            "no analyzable pairs; {} skipped by the exclusion rules",
            skipped.len()
        )));
    }

    let run_config = RunConfig {
        data_dir: args.data_dir.display().to_string(),
        meta: args.meta.display().to_string(),
        include: args.include.as_ref().map(|p| p.display().to_string()),
        methods: config.methods.clone(),
        leader: config.leader,
        bootstrap_iterations: config.bootstrap_iterations,
        seed: config.seed,
        pcause_min: args.pcause_min,
        min_abs_r: args.min_abs_r,
        max_p: MAX_P,
        max_n: args.max_n,
    };
    let summaries = summarize(&outcome.records, &skipped, &run_config);
    let report = Report { config: run_config, records: outcome.records, summaries };

    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", args.out.display())))?;
    match args.format {
        Format::Csv => report::write_csv_report(&args.out, &report),
        Format::Json => report::write_json_report(&args.out, &report),
    }
    .map_err(|e| Failure::Usage(format!("cannot write into {}: {e}", args.out.display())))?;

    let ensemble_row = &report.summaries.filtered_metrics[0];
    println!(
        "analyzed {} pairs ({} skipped); report in {}",
        report.records.len(),
        report.summaries.skipped.len(),
        args.out.display()
    );
    println!(
        "ensemble ({} leader {}): accuracy {}, balanced {}, kappa {}",
        report
            .config
            .methods
            .iter()
            .map(|m| m.label())
            .collect::<Vec<_>>()
            .join("+"),
        report.config.leader.label(),
        report::fmt4(ensemble_row.accuracy),
        report::fmt4(ensemble_row.balanced_accuracy),
        report::fmt4(ensemble_row.kappa),
    );
    Ok(())
}

fn cmd_synth(
    count: usize,
    n: usize,
    noise_sd: f64,
    mechanisms: Vec<Mechanism>,
    cause_dist: CauseDist,
    seed: u64,
    out: &Path,
) -> Result<(), Failure> {
    if count == 0 {
        return Err(Failure::Empty("nothing to generate: --count is 0".to_string()));
    }
    let suite_config = SuiteConfig { n, noise_sd, cause_dist, mechanisms };
    let suite = generate_suite_with(count, seed, &suite_config)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    fs::create_dir_all(out)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", out.display())))?;
    let mut meta = String::new();
    for pair in &suite {
        let path = out.join(format!("{}.txt", pair.id));
        fs::write(&path, pair_file_text(pair))
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
        meta.push_str(&metadata_line(pair).map_err(|e| Failure::Usage(e.to_string()))?);
    }
    let meta_path = out.join("pairmeta.txt");
    fs::write(&meta_path, meta)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", meta_path.display())))?;
    println!("wrote {} pair files and pairmeta.txt into {}", suite.len(), out.display());
    Ok(())
}
