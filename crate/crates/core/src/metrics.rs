//! Scoring decisions against ground truth: confusion matrix, the derived
//! metrics, record filters, and the observation-count sweep.
//!
//! The positive class is always ground-truth `XtoY` (the first-listed
//! variable causes the second). Metrics with an empty denominator are
//! errors here; report layers render them as missing values.

use serde::{Deserialize, Serialize};

use crate::criteria::{Method, PearsonResult};
use crate::dataset::Direction;
use crate::error::{Error, Result};

/// One method's vote on one pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodVote {
    pub method: Method,
    pub decision: Direction,
    pub tie: bool,
}

/// Everything the benchmark stores per pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub pair_id: String,
    /// Number of observations in the pair.
    pub n: usize,
    /// Per-method decisions with their tie flags.
    pub votes: Vec<MethodVote>,
    /// Ensemble verdict under the configured method set and leader.
    pub ensemble: Direction,
    /// All configured methods agreed.
    pub unanimous: bool,
    /// Bootstrap agreement fraction with the ensemble verdict.
    pub p_cause: f64,
    pub pearson: PearsonResult,
    pub ground_truth: Direction,
}

impl DecisionRecord {
    /// This record's vote by `method`, if that method voted.
    pub fn vote(&self, method: Method) -> Option<Direction> {
        self.votes.iter().find(|v| v.method == method).map(|v| v.decision)
    }

    /// Whether `method` flagged a score tie on this pair.
    pub fn vote_tie(&self, method: Method) -> Option<bool> {
        self.votes.iter().find(|v| v.method == method).map(|v| v.tie)
    }

    /// True when the ensemble verdict matches ground truth.
    pub fn ensemble_correct(&self) -> bool {
        self.ensemble == self.ground_truth
    }
}

/// 2x2 confusion counts with ground-truth `XtoY` as the positive class.
///
/// Field names carry a `c` suffix (true-positive count, ...) because
/// `fn` is reserved in Rust.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// True positives: truth XtoY, decided XtoY.
    pub tpc: usize,
    /// False negatives: truth XtoY, decided YtoX.
    pub fnc: usize,
    /// False positives: truth YtoX, decided XtoY.
    pub fpc: usize,
    /// True negatives: truth YtoX, decided YtoX.
    pub tnc: usize,
}

impl ConfusionMatrix {
    pub fn new(tpc: usize, fnc: usize, fpc: usize, tnc: usize) -> Self {
        ConfusionMatrix { tpc, fnc, fpc, tnc }
    }

    pub fn total(&self) -> usize {
        self.tpc + self.fnc + self.fpc + self.tnc
    }

    /// Pairs whose ground truth is the positive class.
    pub fn positives(&self) -> usize {
        self.tpc + self.fnc
    }

    /// Pairs whose ground truth is the negative class.
    pub fn negatives(&self) -> usize {
        self.fpc + self.tnc
    }
}

/// Counts `decision_selector(record)` against each record's ground truth.
pub fn confusion<F>(records: &[DecisionRecord], decision_selector: F) -> ConfusionMatrix
where
    F: Fn(&DecisionRecord) -> Direction,
{
    let mut cm = ConfusionMatrix::default();
    for record in records {
        match (record.ground_truth, decision_selector(record)) {
            (Direction::XtoY, Direction::XtoY) => cm.tpc += 1,
            (Direction::XtoY, Direction::YtoX) => cm.fnc += 1,
            (Direction::YtoX, Direction::XtoY) => cm.fpc += 1,
            (Direction::YtoX, Direction::YtoX) => cm.tnc += 1,
        }
    }
    cm
}

/// Fraction of correct decisions.
pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Undefined("accuracy over zero records".into()));
    }
    Ok((cm.tpc + cm.tnc) as f64 / total as f64)
}

/// Fraction of positive-truth pairs decided positive.
pub fn sensitivity(cm: &ConfusionMatrix) -> Result<f64> {
    let positives = cm.positives();
    if positives == 0 {
        return Err(Error::Undefined("sensitivity with no positive-class records".into()));
    }
    Ok(cm.tpc as f64 / positives as f64)
}

/// Fraction of negative-truth pairs decided negative.
pub fn specificity(cm: &ConfusionMatrix) -> Result<f64> {
    let negatives = cm.negatives();
    if negatives == 0 {
        return Err(Error::Undefined("specificity with no negative-class records".into()));
    }
    Ok(cm.tnc as f64 / negatives as f64)
}

/// Mean of sensitivity and specificity.
pub fn balanced_accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    Ok((sensitivity(cm)? + specificity(cm)?) / 2.0)
}

/// Cohen's kappa: agreement beyond chance.
///
/// `(p_o - p_e) / (1 - p_e)` with `p_o` the accuracy and `p_e` the
/// chance agreement of the marginals. Undefined when the marginals force
/// total chance agreement (`p_e = 1`).
pub fn cohens_kappa(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Undefined("kappa over zero records".into()));
    }
    let t = total as f64;
    let p_o = (cm.tpc + cm.tnc) as f64 / t;
    let decided_xy = (cm.tpc + cm.fpc) as f64;
    let decided_yx = (cm.fnc + cm.tnc) as f64;
    let p_e = (cm.positives() as f64 * decided_xy + cm.negatives() as f64 * decided_yx)
        / (t * t);
    if p_e >= 1.0 {
        return Err(Error::Undefined(
            "kappa with chance agreement 1 (all mass in one cell)".into(),
        ));
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Records whose bootstrap certainty reaches `threshold` (inclusive).
pub fn filter_by_pcause(records: &[DecisionRecord], threshold: f64) -> Vec<DecisionRecord> {
    records.iter().filter(|r| r.p_cause >= threshold).cloned().collect()
}

/// Records with `|pearson r| > min_abs_r` and `p_value < max_p` (both
/// strict), i.e. significantly correlated pairs.
pub fn filter_by_correlation(
    records: &[DecisionRecord],
    min_abs_r: f64,
    max_p: f64,
) -> Vec<DecisionRecord> {
    records
        .iter()
        .filter(|r| r.pearson.r.abs() > min_abs_r && r.pearson.p_value < max_p)
        .cloned()
        .collect()
}

/// Records where every voting method agreed.
pub fn filter_by_unanimity(records: &[DecisionRecord]) -> Vec<DecisionRecord> {
    records.iter().filter(|r| r.unanimous).cloned().collect()
}

/// One point of the accuracy-versus-observations curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Curve point covers records with at most this many observations.
    pub n_threshold: usize,
    /// How many records that is.
    pub records: usize,
    pub balanced_accuracy: Option<f64>,
    pub accuracy: Option<f64>,
    pub kappa: Option<f64>,
}

/// Cumulative metric curves against observation count.
///
/// For each distinct `n` among the records, evaluates the selector's
/// confusion metrics over all records with `record.n <= n`. Undefined
/// metrics (a class missing below the threshold) are `None`, never
/// dropped rows. Rows come back sorted by `n`.
pub fn sweep_by_n_observations<F>(records: &[DecisionRecord], decision_selector: F) -> Vec<SweepPoint>
where
    F: Fn(&DecisionRecord) -> Direction,
{
    let mut thresholds: Vec<usize> = records.iter().map(|r| r.n).collect();
    thresholds.sort_unstable();
    thresholds.dedup();
    thresholds
        .into_iter()
        .map(|n_threshold| {
            let subset: Vec<DecisionRecord> =
                records.iter().filter(|r| r.n <= n_threshold).cloned().collect();
            let cm = confusion(&subset, &decision_selector);
            SweepPoint {
                n_threshold,
                records: subset.len(),
                balanced_accuracy: balanced_accuracy(&cm).ok(),
                accuracy: accuracy(&cm).ok(),
                kappa: cohens_kappa(&cm).ok(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn record(id: &str, n: usize, ensemble: Direction, truth: Direction) -> DecisionRecord {
        DecisionRecord {
            pair_id: id.into(),
            n,
            votes: vec![
                MethodVote { method: Method::Residual, decision: ensemble, tie: false },
                MethodVote { method: Method::Cam, decision: ensemble, tie: false },
            ],
            ensemble,
            unanimous: true,
            p_cause: 1.0,
            pearson: PearsonResult { r: 0.5, p_value: 0.01, n },
            ground_truth: truth,
        }
    }

    fn round4(v: f64) -> f64 {
        (v * 10_000.0).round() / 10_000.0
    }

    #[test]
    fn confusion_all_correct_and_all_inverted() {
        use Direction::{XtoY, YtoX};
        let records = vec![
            record("a", 10, XtoY, XtoY),
            record("b", 10, XtoY, XtoY),
            record("c", 10, XtoY, XtoY),
            record("d", 10, YtoX, YtoX),
            record("e", 10, YtoX, YtoX),
        ];
        let cm = confusion(&records, |r| r.ensemble);
        assert_eq!(cm, ConfusionMatrix::new(3, 0, 0, 2));
        let inverted = confusion(&records, |r| r.ensemble.flipped());
        assert_eq!(inverted, ConfusionMatrix::new(0, 3, 2, 0));
        assert_eq!(cm.total(), records.len());
        assert_eq!(inverted.total(), records.len());
    }

    #[test]
    fn benchmark_row_first_method() {
        // 95-pair benchmark row: sens 49/69, spec 17/26, acc 66/95
        let cm = ConfusionMatrix::new(49, 20, 9, 17);
        assert_eq!(round4(accuracy(&cm).unwrap()), 0.6947);
        assert_eq!(round4(sensitivity(&cm).unwrap()), 0.7101);
        assert_eq!(round4(specificity(&cm).unwrap()), 0.6538);
        assert_eq!(round4(cohens_kappa(&cm).unwrap()), 0.3216);
        assert_eq!(round4(balanced_accuracy(&cm).unwrap()), 0.6820);
        // full-precision freezes of the same quantities
        assert_relative_eq!(accuracy(&cm).unwrap(), 66.0 / 95.0, epsilon = 1e-15);
        assert_relative_eq!(
            cohens_kappa(&cm).unwrap(),
            0.32159566609209567,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            balanced_accuracy(&cm).unwrap(),
            0.6819955406911928,
            epsilon = 1e-12
        );
    }

    #[test]
    fn benchmark_row_second_method() {
        let cm = ConfusionMatrix::new(42, 27, 8, 18);
        assert_eq!(round4(accuracy(&cm).unwrap()), 0.6316);
        assert_eq!(round4(sensitivity(&cm).unwrap()), 0.6087);
        assert_eq!(round4(specificity(&cm).unwrap()), 0.6923);
        assert_eq!(round4(cohens_kappa(&cm).unwrap()), 0.2452);
        assert_relative_eq!(
            cohens_kappa(&cm).unwrap(),
            0.24517593643586824,
            epsilon = 1e-12
        );
    }

    #[test]
    fn benchmark_row_ensemble() {
        // three-method ensemble row: acc 76/95, sens 61/69, spec 15/26
        let cm = ConfusionMatrix::new(61, 8, 11, 15);
        assert_eq!(round4(accuracy(&cm).unwrap()), 0.8);
        assert_eq!(round4(sensitivity(&cm).unwrap()), 0.8841);
        assert_eq!(round4(specificity(&cm).unwrap()), 0.5769);
        assert_eq!(round4(cohens_kappa(&cm).unwrap()), 0.4782);
    }

    #[test]
    fn perfect_and_inverted_matrices() {
        let perfect = ConfusionMatrix::new(1, 0, 0, 1);
        assert_eq!(accuracy(&perfect).unwrap(), 1.0);
        assert_eq!(sensitivity(&perfect).unwrap(), 1.0);
        assert_eq!(specificity(&perfect).unwrap(), 1.0);
        assert_eq!(balanced_accuracy(&perfect).unwrap(), 1.0);
        assert_eq!(cohens_kappa(&perfect).unwrap(), 1.0);
        let inverted = ConfusionMatrix::new(0, 5, 5, 0);
        assert_eq!(balanced_accuracy(&inverted).unwrap(), 0.0);
        assert_eq!(cohens_kappa(&inverted).unwrap(), -1.0);
    }

    #[test]
    fn chance_agreement_gives_zero_kappa() {
        let cm = ConfusionMatrix::new(25, 25, 25, 25);
        assert_eq!(cohens_kappa(&cm).unwrap(), 0.0);
    }

    #[test]
    fn zero_denominators_are_errors() {
        let empty = ConfusionMatrix::default();
        assert!(matches!(accuracy(&empty), Err(Error::Undefined(_))));
        assert!(matches!(cohens_kappa(&empty), Err(Error::Undefined(_))));
        let no_positives = ConfusionMatrix::new(0, 0, 3, 7);
        assert!(matches!(sensitivity(&no_positives), Err(Error::Undefined(_))));
        assert!(specificity(&no_positives).is_ok());
        assert!(matches!(balanced_accuracy(&no_positives), Err(Error::Undefined(_))));
        let no_negatives = ConfusionMatrix::new(3, 7, 0, 0);
        assert!(matches!(specificity(&no_negatives), Err(Error::Undefined(_))));
        // single-cell matrix: marginals force chance agreement 1
        let one_cell = ConfusionMatrix::new(5, 0, 0, 0);
        assert!(matches!(cohens_kappa(&one_cell), Err(Error::Undefined(_))));
    }

    #[test]
    fn accuracy_decomposes_over_classes() {
        let cm = ConfusionMatrix::new(13, 5, 2, 11);
        let p = cm.positives() as f64;
        let n = cm.negatives() as f64;
        let recomposed =
            (sensitivity(&cm).unwrap() * p + specificity(&cm).unwrap() * n) / (p + n);
        assert_relative_eq!(accuracy(&cm).unwrap(), recomposed, epsilon = 1e-15);
    }

    #[test]
    fn kappa_is_one_iff_no_errors() {
        let clean = ConfusionMatrix::new(7, 0, 0, 3);
        assert_eq!(cohens_kappa(&clean).unwrap(), 1.0);
        let dirty = ConfusionMatrix::new(7, 1, 0, 3);
        assert!(cohens_kappa(&dirty).unwrap() < 1.0);
    }

    fn with_pcause(mut r: DecisionRecord, p: f64) -> DecisionRecord {
        r.p_cause = p;
        r
    }

    #[test]
    fn pcause_filter_boundary_is_inclusive() {
        use Direction::XtoY;
        let records = vec![
            with_pcause(record("a", 10, XtoY, XtoY), 0.8),
            with_pcause(record("b", 10, XtoY, XtoY), 0.9),
            with_pcause(record("c", 10, XtoY, XtoY), 1.0),
        ];
        let kept = filter_by_pcause(&records, 0.9);
        let ids: Vec<&str> = kept.iter().map(|r| r.pair_id.as_str()).collect();
        assert_eq!(ids, vec!["b", "c"]);
        assert_eq!(filter_by_pcause(&records, 0.0).len(), 3);
        // monotone: raising the threshold keeps a subset
        let stricter = filter_by_pcause(&records, 1.0);
        assert!(stricter.iter().all(|r| kept.contains(r)));
    }

    #[test]
    fn correlation_filter_uses_absolute_value_and_both_thresholds() {
        use Direction::XtoY;
        let mut weak = record("weak", 10, XtoY, XtoY);
        weak.pearson = PearsonResult { r: 0.05, p_value: 0.001, n: 10 };
        let mut negative = record("negative", 10, XtoY, XtoY);
        negative.pearson = PearsonResult { r: -0.5, p_value: 0.001, n: 10 };
        let mut insignificant = record("insignificant", 10, XtoY, XtoY);
        insignificant.pearson = PearsonResult { r: 0.9, p_value: 0.2, n: 10 };
        let records = vec![weak, negative, insignificant];
        let kept = filter_by_correlation(&records, 0.1, 0.05);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].pair_id, "negative");
        // raising min_abs_r never adds records
        assert!(filter_by_correlation(&records, 0.6, 0.05).is_empty());
    }

    #[test]
    fn unanimity_filter() {
        use Direction::XtoY;
        let unanimous = record("u", 10, XtoY, XtoY);
        let mut split = record("s", 10, XtoY, XtoY);
        split.unanimous = false;
        let records = vec![unanimous, split];
        let kept = filter_by_unanimity(&records);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].pair_id, "u");
        assert!(filter_by_unanimity(&[]).is_empty());
    }

    #[test]
    fn filters_are_idempotent_and_commute() {
        use Direction::{XtoY, YtoX};
        let mut records = Vec::new();
        for i in 0..20usize {
            let truth = if i % 2 == 0 { XtoY } else { YtoX };
            let mut r = record(&format!("p{i}"), 10 + i, truth, truth);
            r.p_cause = f64::from(i as u32 % 11) / 10.0;
            r.unanimous = i % 3 == 0;
            r.pearson = PearsonResult {
                r: (f64::from(i as u32) / 10.0 - 1.0).clamp(-0.95, 0.95),
                p_value: f64::from(i as u32) / 40.0,
                n: 10 + i,
            };
            records.push(r);
        }
        let once = filter_by_pcause(&records, 0.5);
        assert_eq!(filter_by_pcause(&once, 0.5), once);
        let ab = filter_by_correlation(&filter_by_pcause(&records, 0.5), 0.1, 0.05);
        let ba = filter_by_pcause(&filter_by_correlation(&records, 0.1, 0.05), 0.5);
        assert_eq!(ab, ba);
        let au = filter_by_unanimity(&filter_by_pcause(&records, 0.5));
        let ua = filter_by_pcause(&filter_by_unanimity(&records), 0.5);
        assert_eq!(au, ua);
    }

    #[test]
    fn sweep_single_record() {
        use Direction::XtoY;
        let records = vec![record("only", 42, XtoY, XtoY)];
        let sweep = sweep_by_n_observations(&records, |r| r.ensemble);
        assert_eq!(sweep.len(), 1);
        let point = &sweep[0];
        assert_eq!(point.n_threshold, 42);
        assert_eq!(point.records, 1);
        assert_eq!(point.accuracy, Some(1.0));
        // only one class below the threshold: balanced accuracy undefined
        assert_eq!(point.balanced_accuracy, None);
        assert_eq!(point.kappa, None);
    }

    #[test]
    fn sweep_is_cumulative_and_sorted() {
        use Direction::{XtoY, YtoX};
        let records = vec![
            record("a", 30, XtoY, XtoY),
            record("b", 10, YtoX, YtoX),
            record("c", 20, YtoX, XtoY), // wrong at n=20
            record("d", 30, YtoX, YtoX),
        ];
        let sweep = sweep_by_n_observations(&records, |r| r.ensemble);
        let ns: Vec<usize> = sweep.iter().map(|p| p.n_threshold).collect();
        assert_eq!(ns, vec![10, 20, 30]);
        let counts: Vec<usize> = sweep.iter().map(|p| p.records).collect();
        assert_eq!(counts, vec![1, 2, 4]);
        assert_eq!(sweep[0].accuracy, Some(1.0));
        assert_eq!(sweep[1].accuracy, Some(0.5));
        assert_eq!(sweep[2].accuracy, Some(0.75));
        // first threshold has only YtoX truths -> sensitivity undefined
        assert_eq!(sweep[0].balanced_accuracy, None);
        assert!(sweep[2].balanced_accuracy.is_some());
    }

    #[test]
    fn sweep_adding_correct_records_cannot_lower_accuracy() {
        use Direction::{XtoY, YtoX};
        let records = vec![
            record("a", 10, XtoY, YtoX), // wrong
            record("b", 10, XtoY, XtoY),
            record("c", 20, XtoY, XtoY), // correct additions at n=20
            record("d", 20, YtoX, YtoX),
        ];
        let sweep = sweep_by_n_observations(&records, |r| r.ensemble);
        assert!(sweep[1].accuracy.unwrap() >= sweep[0].accuracy.unwrap());
    }
}
