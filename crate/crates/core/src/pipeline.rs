//! Per-pair analysis and the parallel dataset driver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::p_cause;
use crate::criteria::{decide_all, pearson, Method};
use crate::dataset::{PairSample, SkippedPair};
use crate::ensemble::vote_scores;
use crate::error::{Error, Result};
use crate::metrics::{DecisionRecord, MethodVote};

/// What to run on every pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Methods feeding the ensemble vote and the bootstrap.
    pub methods: Vec<Method>,
    pub leader: Method,
    pub bootstrap_iterations: u32,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            methods: Method::ALL.to_vec(),
            leader: Method::Residual,
            bootstrap_iterations: 10,
            seed: 42,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("no methods configured".into()));
        }
        if !self.methods.contains(&self.leader) {
            return Err(Error::Config(format!(
                "leader {} is not among the configured methods",
                self.leader
            )));
        }
        if self.bootstrap_iterations == 0 {
            return Err(Error::Config("bootstrap needs at least one iteration".into()));
        }
        Ok(())
    }
}

/// Everything the benchmark computes for one pair: all four method
/// votes, the configured ensemble verdict, its bootstrap certainty, and
/// the Pearson correlation.
///
/// All four criteria are always recorded (so reports can enumerate
/// method combinations afterwards); `config.methods` and `config.leader`
/// govern only the ensemble verdict, the unanimity flag, and the
/// bootstrap.
pub fn analyze_pair(pair: &PairSample, config: &AnalysisConfig) -> Result<DecisionRecord> {
    config.validate()?;
    let ground_truth = pair.ground_truth.ok_or_else(|| {
        Error::Config(format!("pair `{}` has no ground truth to score against", pair.id))
    })?;
    let scores = decide_all(pair)?;
    let voting: Vec<_> =
        scores.iter().filter(|s| config.methods.contains(&s.method)).copied().collect();
    let ensemble = vote_scores(&voting, config.leader)?;
    let certainty = p_cause(
        pair,
        &config.methods,
        config.leader,
        config.bootstrap_iterations,
        config.seed,
    )?;
    debug_assert_eq!(certainty.full_sample_decision, ensemble.decision);
    let correlation = pearson(&pair.x, &pair.y)?;
    Ok(DecisionRecord {
        pair_id: pair.id.clone(),
        n: pair.len(),
        votes: scores
            .iter()
            .map(|s| MethodVote { method: s.method, decision: s.decision, tie: s.tie })
            .collect(),
        ensemble: ensemble.decision,
        unanimous: ensemble.unanimous,
        p_cause: certainty.p_cause,
        pearson: correlation,
        ground_truth,
    })
}

/// Dataset-level result: records for analyzable pairs, skip reasons for
/// the rest.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnalysisOutcome {
    pub records: Vec<DecisionRecord>,
    pub skipped: Vec<SkippedPair>,
}

/// Runs [`analyze_pair`] over the dataset on the rayon worker pool.
///
/// Pairs that fail (degenerate columns, too short) become skip entries
/// instead of sinking the run. Output is sorted by pair id, and since
/// every randomized stage seeds itself from `(config.seed, pair id)`,
/// the result is identical for any worker count.
pub fn analyze_dataset(
    pairs: &[PairSample],
    config: &AnalysisConfig,
) -> Result<AnalysisOutcome> {
    config.validate()?;
    let mut results: Vec<(String, Result<DecisionRecord>)> = pairs
        .par_iter()
        .map(|pair| (pair.id.clone(), analyze_pair(pair, config)))
        .collect();
    results.sort_by(|a, b| a.0.cmp(&b.0));
    let mut outcome = AnalysisOutcome::default();
    for (id, result) in results {
        match result {
            Ok(record) => outcome.records.push(record),
            Err(err) => outcome.skipped.push(SkippedPair { id, reason: err.to_string() }),
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Direction;
    use crate::synth::{generate_suite_with, SuiteConfig};

    fn small_suite(count: usize) -> Vec<PairSample> {
        generate_suite_with(count, 31, &SuiteConfig { n: 60, ..SuiteConfig::default() })
            .unwrap()
    }

    #[test]
    fn record_is_fully_populated() {
        let pairs = small_suite(1);
        let record = analyze_pair(&pairs[0], &AnalysisConfig::default()).unwrap();
        assert_eq!(record.pair_id, "synth0001");
        assert_eq!(record.n, 60);
        assert_eq!(record.votes.len(), 4);
        assert!((0.0..=1.0).contains(&record.p_cause));
        assert!(record.pearson.p_value.is_finite());
        assert_eq!(record.ground_truth, Direction::XtoY);
        for method in Method::ALL {
            assert!(record.vote(method).is_some());
        }
    }

    #[test]
    fn unanimity_reflects_configured_methods_only() {
        // pick a pair and a subset on which the configured methods agree
        // even if all four do not
        let pairs = small_suite(6);
        let config = AnalysisConfig {
            methods: vec![Method::Residual, Method::Cam],
            leader: Method::Residual,
            ..AnalysisConfig::default()
        };
        for pair in &pairs {
            let record = analyze_pair(pair, &config).unwrap();
            let agree = record.vote(Method::Residual) == record.vote(Method::Cam);
            assert_eq!(record.unanimous, agree, "pair {}", pair.id);
        }
    }

    #[test]
    fn missing_ground_truth_is_rejected() {
        let mut pairs = small_suite(1);
        pairs[0].ground_truth = None;
        assert!(matches!(
            analyze_pair(&pairs[0], &AnalysisConfig::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn invalid_configs_are_rejected_upfront() {
        let pairs = small_suite(1);
        let bad_leader = AnalysisConfig {
            methods: vec![Method::Residual, Method::Cam],
            leader: Method::Gradient,
            ..AnalysisConfig::default()
        };
        assert!(matches!(analyze_dataset(&pairs, &bad_leader), Err(Error::Config(_))));
        let no_methods = AnalysisConfig { methods: vec![], ..AnalysisConfig::default() };
        assert!(matches!(analyze_dataset(&pairs, &no_methods), Err(Error::Config(_))));
        let no_iters =
            AnalysisConfig { bootstrap_iterations: 0, ..AnalysisConfig::default() };
        assert!(matches!(analyze_dataset(&pairs, &no_iters), Err(Error::Config(_))));
    }

    #[test]
    fn dataset_records_sorted_and_total() {
        let mut pairs = small_suite(5);
        pairs.reverse(); // feed out of order
        // sabotage one pair so it lands in skipped
        pairs[2].x = vec![1.0; pairs[2].len()];
        let outcome = analyze_dataset(&pairs, &AnalysisConfig::default()).unwrap();
        assert_eq!(outcome.records.len() + outcome.skipped.len(), pairs.len());
        let ids: Vec<&str> = outcome.records.iter().map(|r| r.pair_id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        assert_eq!(ids, sorted);
        assert_eq!(outcome.skipped.len(), 1);
        assert!(outcome.skipped[0].reason.contains("constant"));
    }

    #[test]
    fn dataset_analysis_is_worker_count_invariant() {
        let pairs = small_suite(6);
        let config = AnalysisConfig::default();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| analyze_dataset(&pairs, &config))
            .unwrap();
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| analyze_dataset(&pairs, &config))
            .unwrap();
        assert_eq!(single, many);
        for (a, b) in single.records.iter().zip(&many.records) {
            assert_eq!(a.p_cause.to_bits(), b.p_cause.to_bits());
            assert_eq!(a.pearson.r.to_bits(), b.pearson.r.to_bits());
        }
    }
}
