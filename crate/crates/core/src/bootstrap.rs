//! Bootstrap certainty for an ensemble verdict.
//!
//! The full sample gives one verdict; resampling the observation rows
//! with replacement and re-running the ensemble measures how stable that
//! verdict is. `p_cause` is the fraction of resamples that agree with
//! the full-sample decision, so it lives on the grid `0, 1/k, ..., 1`
//! for `k` iterations and is reproducible bit-for-bit from the seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{decide_methods, Method};
use crate::dataset::{Direction, PairSample};
use crate::ensemble::vote_scores;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// How often a constant-column resample is redrawn before that iteration
/// counts as a disagreement.
const MAX_REDRAWS: usize = 100;

/// Bootstrap agreement with the full-sample ensemble decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PCauseResult {
    /// Fraction of resamples whose ensemble decision matched the
    /// full-sample one.
    pub p_cause: f64,
    pub full_sample_decision: Direction,
    pub iterations: u32,
    pub seed: u64,
}

/// Runs `iterations` bootstrap resamples of `pair` through the same
/// ensemble as the full sample and reports the agreement fraction.
///
/// Each iteration draws its RNG stream from `(seed, pair id, iteration
/// index)`, so the result is independent of evaluation order and worker
/// count. Resamples that come out constant in either column are redrawn
/// (up to a bounded number of attempts); an iteration that cannot
/// produce a decidable resample counts as a disagreement rather than
/// being silently dropped.
pub fn p_cause(
    pair: &PairSample,
    methods: &[Method],
    leader: Method,
    iterations: u32,
    seed: u64,
) -> Result<PCauseResult> {
    if iterations == 0 {
        return Err(Error::Config("bootstrap needs at least one iteration".into()));
    }
    let full_scores = decide_methods(pair, methods)?;
    let full = vote_scores(&full_scores, leader)?;
    let n = pair.len();
    let mut agreements: u32 = 0;
    for i in 0..iterations {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &pair.id, u64::from(i)));
        let mut decision = None;
        for _ in 0..MAX_REDRAWS {
            let mut x = Vec::with_capacity(n);
            let mut y = Vec::with_capacity(n);
            for _ in 0..n {
                let j = rng.random_range(0..n);
                x.push(pair.x[j]);
                y.push(pair.y[j]);
            }
            if is_constant(&x) || is_constant(&y) {
                continue;
            }
            let resample =
                PairSample { id: pair.id.clone(), x, y, ground_truth: None, weight: pair.weight };
            match decide_methods(&resample, methods).and_then(|s| vote_scores(&s, leader)) {
                Ok(vote) => {
                    decision = Some(vote.decision);
                    break;
                }
                // a resample can still be numerically degenerate past the
                // constant check; treat it like a constant draw
                Err(_) => continue,
            }
        }
        if decision == Some(full.decision) {
            agreements += 1;
        }
    }
    Ok(PCauseResult {
        p_cause: f64::from(agreements) / f64::from(iterations),
        full_sample_decision: full.decision,
        iterations,
        seed,
    })
}

fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}
