//! Benchmark report assembly: summary tables recomputed from the
//! per-pair decision records, emitted as CSV files or one JSON object.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use causeway_core::criteria::Method;
use causeway_core::dataset::{Direction, SkippedPair};
use causeway_core::ensemble::majority_vote;
use causeway_core::metrics::{
    accuracy, balanced_accuracy, cohens_kappa, confusion, filter_by_correlation,
    filter_by_pcause, filter_by_unanimity, sensitivity, specificity,
    sweep_by_n_observations, DecisionRecord, SweepPoint,
};

/// The benchmark invocation, echoed into every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub data_dir: String,
    pub meta: String,
    pub include: Option<String>,
    pub methods: Vec<Method>,
    pub leader: Method,
    pub bootstrap_iterations: u32,
    pub seed: u64,
    pub pcause_min: f64,
    pub min_abs_r: f64,
    pub max_p: f64,
    pub max_n: Option<usize>,
}

/// One summary-table row: a labelled confusion matrix with its derived
/// metrics. Undefined metrics (empty denominator) stay `None` and render
/// as `NA` in CSV, `null` in JSON.
#[derive(Clone, Debug, Serialize)]
pub struct MetricRow {
    pub label: String,
    /// Tie-breaking method, where one can matter (even voter counts).
    pub leader: Option<String>,
    pub records: usize,
    pub tp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub fp: usize,
    pub tn: usize,
    pub accuracy: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub balanced_accuracy: Option<f64>,
    pub kappa: Option<f64>,
}

/// Raw material for certainty plots: one point per pair.
#[derive(Clone, Debug, Serialize)]
pub struct PCausePoint {
    pub pair_id: String,
    pub p_cause: f64,
    pub ensemble_correct: bool,
    pub unanimous: bool,
}

/// All summary tables derived from the records.
#[derive(Clone, Debug, Serialize)]
pub struct Summaries {
    pub method_metrics: Vec<MetricRow>,
    pub ensemble_metrics: Vec<MetricRow>,
    pub filtered_metrics: Vec<MetricRow>,
    pub correlation_filtered_metrics: Vec<MetricRow>,
    pub sweep: Vec<SweepPoint>,
    pub pcause_data: Vec<PCausePoint>,
    pub skipped: Vec<SkippedPair>,
}

/// The full benchmark report.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub records: Vec<DecisionRecord>,
    pub summaries: Summaries,
}

/// A labelled confusion matrix with its metrics over `records` under
/// `selector`.
pub fn metric_row<F>(
    label: &str,
    leader: Option<Method>,
    records: &[DecisionRecord],
    selector: F,
) -> MetricRow
where
    F: Fn(&DecisionRecord) -> Direction,
{
    let cm = confusion(records, selector);
    MetricRow {
        label: label.to_string(),
        leader: leader.map(|m| m.label().to_string()),
        records: records.len(),
        tp: cm.tpc,
        fn_: cm.fnc,
        fp: cm.fpc,
        tn: cm.tnc,
        accuracy: accuracy(&cm).ok(),
        sensitivity: sensitivity(&cm).ok(),
        specificity: specificity(&cm).ok(),
        balanced_accuracy: balanced_accuracy(&cm).ok(),
        kappa: cohens_kappa(&cm).ok(),
    }
}

/// Re-votes one record under an arbitrary method subset and leader,
/// using the stored per-method decisions.
pub fn revote(record: &DecisionRecord, methods: &[Method], leader: Method) -> Direction {
    let votes: Vec<(Method, Direction)> = methods
        .iter()
        .map(|&m| (m, record.vote(m).expect("records store all four method votes")))
        .collect();
    majority_vote(&votes, leader)
        .expect("leader is drawn from the method subset")
        .decision
}

fn joined(methods: &[Method]) -> String {
    methods.iter().map(|m| m.label()).collect::<Vec<_>>().join("+")
}

/// Builds every summary table from the per-pair records.
pub fn summarize(
    records: &[DecisionRecord],
    skipped: &[SkippedPair],
    config: &RunConfig,
) -> Summaries {
    let ensemble_of = |r: &DecisionRecord| r.ensemble;

    let method_metrics: Vec<MetricRow> = Method::ALL
        .iter()
        .map(|&m| {
            metric_row(m.label(), None, records, |r| {
                r.vote(m).expect("records store all four method votes")
            })
        })
        .collect();

    // The configured ensemble first, then the recombinations the stored
    // votes support: all four methods under each possible leader, and
    // every three-method subset (odd voter count, so no leader is ever
    // consulted).
    let mut ensemble_metrics = vec![metric_row(
        &format!("configured {}", joined(&config.methods)),
        Some(config.leader),
        records,
        ensemble_of,
    )];
    for leader in Method::ALL {
        ensemble_metrics.push(metric_row(&joined(&Method::ALL), Some(leader), records, |r| {
            revote(r, &Method::ALL, leader)
        }));
    }
    for skip in Method::ALL {
        let trio: Vec<Method> = Method::ALL.into_iter().filter(|&m| m != skip).collect();
        ensemble_metrics.push(metric_row(&joined(&trio), None, records, |r| {
            revote(r, &trio, trio[0])
        }));
    }

    let filtered_metrics = vec![
        metric_row("all", Some(config.leader), records, ensemble_of),
        metric_row(
            &format!("p_cause>={}", config.pcause_min),
            Some(config.leader),
            &filter_by_pcause(records, config.pcause_min),
            ensemble_of,
        ),
        metric_row(
            "p_cause=1",
            Some(config.leader),
            &filter_by_pcause(records, 1.0),
            ensemble_of,
        ),
        metric_row(
            "unanimous",
            Some(config.leader),
            &filter_by_unanimity(records),
            ensemble_of,
        ),
    ];

    let correlated = filter_by_correlation(records, config.min_abs_r, config.max_p);
    let mut correlation_filtered_metrics: Vec<MetricRow> = Method::ALL
        .iter()
        .map(|&m| {
            metric_row(m.label(), None, &correlated, |r| {
                r.vote(m).expect("records store all four method votes")
            })
        })
        .collect();
    correlation_filtered_metrics.push(metric_row(
        "ensemble",
        Some(config.leader),
        &correlated,
        ensemble_of,
    ));

    Summaries {
        method_metrics,
        ensemble_metrics,
        filtered_metrics,
        correlation_filtered_metrics,
        sweep: sweep_by_n_observations(records, ensemble_of),
        pcause_data: records
            .iter()
            .map(|r| PCausePoint {
                pair_id: r.pair_id.clone(),
                p_cause: r.p_cause,
                ensemble_correct: r.ensemble_correct(),
                unanimous: r.unanimous,
            })
            .collect(),
        skipped: skipped.to_vec(),
    }
}

/// `Some(v)` as a fixed 4-decimal string, `None` as `NA`.
pub(crate) fn fmt4(value: Option<f64>) -> String {
    match value {
        None => "NA".to_string(),
        Some(v) => {
            let s = format!("{v:.4}");
            if s == "-0.0000" {
                "0.0000".to_string()
            } else {
                s
            }
        }
    }
}

fn write_metric_table(path: &Path, rows: &[MetricRow]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "label",
        "leader",
        "records",
        "tp",
        "fn",
        "fp",
        "tn",
        "accuracy",
        "sensitivity",
        "specificity",
        "balanced_accuracy",
        "kappa",
    ])?;
    for row in rows {
        w.write_record([
            row.label.clone(),
            row.leader.clone().unwrap_or_default(),
            row.records.to_string(),
            row.tp.to_string(),
            row.fn_.to_string(),
            row.fp.to_string(),
            row.tn.to_string(),
            fmt4(row.accuracy),
            fmt4(row.sensitivity),
            fmt4(row.specificity),
            fmt4(row.balanced_accuracy),
            fmt4(row.kappa),
        ])?;
    }
    w.flush()
}

/// Writes the per-pair table. Decisions and floats are emitted at full
/// precision (shortest round-trip), so summaries can be recomputed from
/// this file alone.
fn write_records(path: &Path, records: &[DecisionRecord]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "pair_id",
        "n",
        "m1",
        "m1_tie",
        "m2",
        "m2_tie",
        "m3",
        "m3_tie",
        "m4",
        "m4_tie",
        "ensemble",
        "unanimous",
        "p_cause",
        "pearson_r",
        "pearson_p",
        "ground_truth",
    ])?;
    for r in records {
        let mut fields = vec![r.pair_id.clone(), r.n.to_string()];
        for m in Method::ALL {
            fields.push(r.vote(m).expect("all votes recorded").to_string());
            fields.push(r.vote_tie(m).expect("all votes recorded").to_string());
        }
        fields.push(r.ensemble.to_string());
        fields.push(r.unanimous.to_string());
        fields.push(r.p_cause.to_string());
        fields.push(r.pearson.r.to_string());
        // p-values span many orders of magnitude; scientific notation
        // keeps the field short and still round-trips exactly
        fields.push(format!("{:e}", r.pearson.p_value));
        fields.push(r.ground_truth.to_string());
        w.write_record(&fields)?;
    }
    w.flush()
}

fn write_sweep(path: &Path, sweep: &[SweepPoint]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n_threshold", "records", "balanced_accuracy", "accuracy", "kappa"])?;
    for p in sweep {
        w.write_record([
            p.n_threshold.to_string(),
            p.records.to_string(),
            fmt4(p.balanced_accuracy),
            fmt4(p.accuracy),
            fmt4(p.kappa),
        ])?;
    }
    w.flush()
}

fn write_pcause_data(path: &Path, points: &[PCausePoint]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["pair_id", "p_cause", "ensemble_correct", "unanimous"])?;
    for p in points {
        w.write_record([
            p.pair_id.clone(),
            p.p_cause.to_string(),
            p.ensemble_correct.to_string(),
            p.unanimous.to_string(),
        ])?;
    }
    w.flush()
}

fn write_skipped(path: &Path, skipped: &[SkippedPair]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["pair_id", "reason"])?;
    for s in skipped {
        w.write_record([s.id.clone(), s.reason.clone()])?;
    }
    w.flush()
}

/// Writes the CSV report set into `dir`.
pub fn write_csv_report(dir: &Path, report: &Report) -> io::Result<()> {
    write_records(&dir.join("records.csv"), &report.records)?;
    write_metric_table(&dir.join("method_metrics.csv"), &report.summaries.method_metrics)?;
    write_metric_table(&dir.join("ensemble_metrics.csv"), &report.summaries.ensemble_metrics)?;
    write_metric_table(&dir.join("filtered_metrics.csv"), &report.summaries.filtered_metrics)?;
    write_metric_table(
        &dir.join("correlation_filtered_metrics.csv"),
        &report.summaries.correlation_filtered_metrics,
    )?;
    write_sweep(&dir.join("sweep.csv"), &report.summaries.sweep)?;
    write_pcause_data(&dir.join("pcause_data.csv"), &report.summaries.pcause_data)?;
    write_skipped(&dir.join("skipped.csv"), &report.summaries.skipped)?;
    Ok(())
}

/// Writes the full-precision JSON report (`config`, `records`,
/// `summaries`) into `dir`.
pub fn write_json_report(dir: &Path, report: &Report) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(dir.join("report.json"), text)
}
