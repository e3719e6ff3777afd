//! Cause-effect pair data: file parsing, metadata, dataset assembly with
//! exclusion rules, and standardization.
//!
//! A pair file is whitespace-separated numeric text, one observation per
//! row. A metadata line names a pair and says which column range holds
//! the cause and which the effect; only pairs where both ranges are a
//! single column are usable here, everything else is skipped with a
//! reason rather than silently dropped.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Causal verdict between the two columns of a pair.
///
/// `XtoY` means "the first (lower-indexed) column causes the second" and
/// is the positive class wherever decisions are scored against ground
/// truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    XtoY,
    YtoX,
}

impl Direction {
    /// The opposite verdict.
    pub fn flipped(self) -> Self {
        match self {
            Direction::XtoY => Direction::YtoX,
            Direction::YtoX => Direction::XtoY,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::XtoY => "XtoY",
            Direction::YtoX => "YtoX",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "XtoY" | "xtoy" | "x->y" => Ok(Direction::XtoY),
            "YtoX" | "ytox" | "y->x" => Ok(Direction::YtoX),
            other => Err(Error::Config(format!("unknown direction `{other}`"))),
        }
    }
}

/// One bivariate sample, optionally with known ground truth.
///
/// Invariants (enforced by [`PairSample::new`]): `x` and `y` have equal
/// length, at least 3 observations, all values finite, weight finite and
/// non-negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub id: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub ground_truth: Option<Direction>,
    pub weight: f64,
}

impl PairSample {
    pub fn new(
        id: String,
        x: Vec<f64>,
        y: Vec<f64>,
        ground_truth: Option<Direction>,
        weight: f64,
    ) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
        }
        if x.len() < 3 {
            return Err(Error::TooShort { needed: 3, got: x.len() });
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("pair `{id}`")));
        }
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::NonFinite(format!("weight of pair `{id}`")));
        }
        Ok(PairSample { id, x, y, ground_truth, weight })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// The same sample with columns exchanged (and ground truth flipped).
    pub fn swapped(&self) -> Self {
        PairSample {
            id: self.id.clone(),
            x: self.y.clone(),
            y: self.x.clone(),
            ground_truth: self.ground_truth.map(Direction::flipped),
            weight: self.weight,
        }
    }

    /// The sample truncated to its first `max_n` observations.
    pub fn truncated(&self, max_n: usize) -> Self {
        let n = self.len().min(max_n);
        PairSample {
            id: self.id.clone(),
            x: self.x[..n].to_vec(),
            y: self.y[..n].to_vec(),
            ground_truth: self.ground_truth,
            weight: self.weight,
        }
    }
}

/// One line of a pair-metadata file: 1-based column ranges for cause and
/// effect plus a weight.
///
/// Invariants (enforced by [`parse_metadata`]): column indices are >= 1,
/// each range has `last >= first`, the two ranges do not overlap, weight
/// is finite and non-negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairMetadata {
    pub pair_id: String,
    pub cause_first_col: usize,
    pub cause_last_col: usize,
    pub effect_first_col: usize,
    pub effect_last_col: usize,
    pub weight: f64,
}

impl PairMetadata {
    /// True when both cause and effect occupy a single column.
    pub fn is_bivariate(&self) -> bool {
        self.cause_first_col == self.cause_last_col
            && self.effect_first_col == self.effect_last_col
    }
}

/// Parses whitespace-separated numeric text into rows.
///
/// Blank lines are skipped; every non-blank row must have the same number
/// of columns; every token must parse as a finite float. Errors carry the
/// 1-based line number.
pub fn parse_pair_file(text: &str) -> Result<Vec<Vec<f64>>> {
    if text.trim().is_empty() {
        return Err(Error::Format { line: 1, message: "empty pair file".into() });
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for token in line.split_whitespace() {
            let value: f64 = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("non-numeric token `{token}`"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-finite value `{token}`"),
                });
            }
            row.push(value);
        }
        if rows.is_empty() {
            width = row.len();
        } else if row.len() != width {
            return Err(Error::Format {
                line: line_no,
                message: format!("ragged row: expected {width} columns, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Parses a metadata file: `pair_id cause_first cause_last effect_first
/// effect_last weight`, one pair per line, blank lines skipped.
pub fn parse_metadata(text: &str) -> Result<Vec<PairMetadata>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::Format {
                line: line_no,
                message: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let col = |field: &str, name: &str| -> Result<usize> {
            let v: usize = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("{name}: not a column index: `{field}`"),
            })?;
            if v == 0 {
                return Err(Error::Format {
                    line: line_no,
                    message: format!("{name}: column indices are 1-based"),
                });
            }
            Ok(v)
        };
        let meta = PairMetadata {
            pair_id: fields[0].to_string(),
            cause_first_col: col(fields[1], "cause first column")?,
            cause_last_col: col(fields[2], "cause last column")?,
            effect_first_col: col(fields[3], "effect first column")?,
            effect_last_col: col(fields[4], "effect last column")?,
            weight: fields[5].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("weight: not a number: `{}`", fields[5]),
            })?,
        };
        if meta.cause_last_col < meta.cause_first_col {
            return Err(Error::Format {
                line: line_no,
                message: "cause column range ends before it starts".into(),
            });
        }
        if meta.effect_last_col < meta.effect_first_col {
            return Err(Error::Format {
                line: line_no,
                message: "effect column range ends before it starts".into(),
            });
        }
        let disjoint = meta.cause_last_col < meta.effect_first_col
            || meta.effect_last_col < meta.cause_first_col;
        if !disjoint {
            return Err(Error::Format {
                line: line_no,
                message: "cause and effect column ranges overlap".into(),
            });
        }
        if !meta.weight.is_finite() || meta.weight < 0.0 {
            return Err(Error::Format {
                line: line_no,
                message: format!("weight must be finite and non-negative, got {}", fields[5]),
            });
        }
        out.push(meta);
    }
    Ok(out)
}

/// A pair excluded from analysis, with the reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedPair {
    pub id: String,
    pub reason: String,
}

/// Result of assembling a dataset: usable samples plus skip report.
#[derive(Clone, Debug, Default)]
pub struct LoadOutcome {
    pub samples: Vec<PairSample>,
    pub skipped: Vec<SkippedPair>,
}

/// Assembles samples from raw pair-file texts and their metadata.
///
/// `x` receives the lower-indexed of the two columns and `y` the higher,
/// so `ground_truth` is `XtoY` exactly when the cause range is the lower
/// column. Pairs are skipped (with a reason) when the metadata names a
/// multi-column range, a referenced column is beyond the file's width,
/// the file fails to parse, or the sample violates [`PairSample`]
/// invariants. A pair file missing from `pair_texts` entirely is an
/// error, not a skip: it means the dataset directory is wrong.
///
/// Every metadata entry ends up either in `samples` or in `skipped`.
pub fn load_dataset(
    pair_texts: &BTreeMap<String, String>,
    metadata: &[PairMetadata],
) -> Result<LoadOutcome> {
    let mut outcome = LoadOutcome::default();
    for meta in metadata {
        let text = pair_texts
            .get(&meta.pair_id)
            .ok_or_else(|| Error::MissingFile(meta.pair_id.clone()))?;
        let skip = |reason: String, outcome: &mut LoadOutcome| {
            outcome.skipped.push(SkippedPair { id: meta.pair_id.clone(), reason });
        };
        if !meta.is_bivariate() {
            skip("multivariate pair (multi-column cause or effect)".into(), &mut outcome);
            continue;
        }
        let cause_col = meta.cause_first_col;
        let effect_col = meta.effect_first_col;
        if cause_col == effect_col {
            skip("cause and effect name the same column".into(), &mut outcome);
            continue;
        }
        let rows = match parse_pair_file(text) {
            Ok(rows) => rows,
            Err(err) => {
                skip(format!("unreadable pair file: {err}"), &mut outcome);
                continue;
            }
        };
        let width = rows.first().map_or(0, Vec::len);
        if cause_col > width || effect_col > width {
            skip(
                format!("metadata names column {}, file has {width}", cause_col.max(effect_col)),
                &mut outcome,
            );
            continue;
        }
        let lower = cause_col.min(effect_col);
        let higher = cause_col.max(effect_col);
        let x: Vec<f64> = rows.iter().map(|r| r[lower - 1]).collect();
        let y: Vec<f64> = rows.iter().map(|r| r[higher - 1]).collect();
        let truth =
            if cause_col < effect_col { Direction::XtoY } else { Direction::YtoX };
        match PairSample::new(meta.pair_id.clone(), x, y, Some(truth), meta.weight) {
            Ok(sample) => outcome.samples.push(sample),
            Err(err) => skip(err.to_string(), &mut outcome),
        }
    }
    Ok(outcome)
}

/// A vector rescaled to zero mean and unit sample variance.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardized {
    pub values: Vec<f64>,
    /// True when the input was constant; `values` is then all zeros.
    pub degenerate: bool,
}

/// Centers and scales to unit sample standard deviation (n-1 denominator).
///
/// A constant input cannot be scaled; it comes back as zeros with the
/// `degenerate` flag set so callers can reject it with context.
pub fn standardize(values: &[f64]) -> Result<Standardized> {
    if values.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: values.len() });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (n - 1.0)).sqrt();
    if sd == 0.0 {
        return Ok(Standardized { values: vec![0.0; values.len()], degenerate: true });
    }
    Ok(Standardized {
        values: values.iter().map(|v| (v - mean) / sd).collect(),
        degenerate: false,
    })
}

/// Sample mean.
pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance with n-1 denominator. Errors on constant input where
/// a zero variance would later divide something.
pub(crate) fn sample_variance(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: values.len() });
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Ok(ss / (values.len() as f64 - 1.0))
}
