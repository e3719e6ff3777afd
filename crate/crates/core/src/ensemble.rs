//! Majority vote across method decisions, with a designated leader
//! breaking exact vote ties.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::criteria::{DirectionScore, Method};
use crate::dataset::Direction;
use crate::error::{Error, Result};

/// Outcome of combining several method votes on one pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub decision: Direction,
    /// All voters agreed (equivalently: one side has zero votes).
    pub unanimous: bool,
    pub votes_xy: usize,
    pub votes_yx: usize,
    pub leader: Method,
    /// True only when the vote was an exact tie and the leader's own
    /// vote decided.
    pub leader_used: bool,
    /// How many voters flagged their own score comparison as tied.
    pub tied_votes: usize,
}

/// Combines raw `(method, direction)` votes by strict majority; on an
/// exact tie the leader's own vote is the verdict.
///
/// The leader must be among the voters. Vote order does not matter.
pub fn majority_vote(votes: &[(Method, Direction)], leader: Method) -> Result<EnsembleResult> {
    if votes.is_empty() {
        return Err(Error::Config("cannot vote with no methods".into()));
    }
    let leader_vote = votes
        .iter()
        .find(|(m, _)| *m == leader)
        .map(|&(_, d)| d)
        .ok_or_else(|| {
            Error::Config(format!("leader {leader} is not among the voting methods"))
        })?;
    let votes_xy = votes.iter().filter(|(_, d)| *d == Direction::XtoY).count();
    let votes_yx = votes.len() - votes_xy;
    let (decision, leader_used) = match votes_xy.cmp(&votes_yx) {
        Ordering::Greater => (Direction::XtoY, false),
        Ordering::Less => (Direction::YtoX, false),
        Ordering::Equal => (leader_vote, true),
    };
    Ok(EnsembleResult {
        decision,
        unanimous: votes_xy == 0 || votes_yx == 0,
        votes_xy,
        votes_yx,
        leader,
        leader_used,
        tied_votes: 0,
    })
}

/// [`majority_vote`] over criterion results, additionally recording how
/// many of them flagged a score tie.
pub fn vote_scores(scores: &[DirectionScore], leader: Method) -> Result<EnsembleResult> {
    let votes: Vec<(Method, Direction)> =
        scores.iter().map(|s| (s.method, s.decision)).collect();
    let mut result = majority_vote(&votes, leader)?;
    result.tied_votes = scores.iter().filter(|s| s.tie).count();
    Ok(result)
}
