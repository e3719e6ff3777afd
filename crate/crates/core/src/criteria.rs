//! The four direction criteria.
//!
//! All four compare a one-number summary of the regression `y ~ x`
//! against the same summary of `x ~ y` and pick the direction whose
//! regression looks simpler:
//!
//! * **M1 (gradient)** — mean absolute derivative of the kernel fit;
//!   flatter wins.
//! * **M2 (residual)** — mean absolute residual; smaller wins.
//! * **M3 (generalized correlation)** — square root of the variance
//!   fraction the fit explains, signed by the Pearson correlation;
//!   larger magnitude wins.
//! * **M4 (additive-model score)** — `-log(var(residuals))/2`; higher
//!   (i.e. smaller residual variance) wins.
//!
//! Both columns are standardized internally before fitting, so every
//! criterion is invariant to affine rescaling of the raw data. Scores
//! within a relative `1e-12` of each other are a tie, resolved as
//! `XtoY` by convention with the `tie` flag set.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::dataset::{mean, sample_variance, standardize, Direction, PairSample};
use crate::error::{Error, Result};
use crate::kernelreg::KernelFit;

/// Floor applied to residual variances inside the additive-model score,
/// so noiseless fits do not take the log of zero.
const VARIANCE_FLOOR: f64 = 1e-12;

/// Relative tolerance under which two direction scores count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// The four decision methods, in their conventional report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// M1: mean absolute kernel-fit gradient.
    #[serde(rename = "M1")]
    Gradient,
    /// M2: mean absolute kernel-fit residual.
    #[serde(rename = "M2")]
    Residual,
    /// M3: generalized correlation magnitude.
    #[serde(rename = "M3")]
    GenCorr,
    /// M4: bivariate additive-model score.
    #[serde(rename = "M4")]
    Cam,
}

impl Method {
    pub const ALL: [Method; 4] =
        [Method::Gradient, Method::Residual, Method::GenCorr, Method::Cam];

    /// Report label (`M1`..`M4`).
    pub fn label(self) -> &'static str {
        match self {
            Method::Gradient => "M1",
            Method::Residual => "M2",
            Method::GenCorr => "M3",
            Method::Cam => "M4",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "m1" | "gradient" => Ok(Method::Gradient),
            "m2" | "residual" => Ok(Method::Residual),
            "m3" | "gencorr" | "generalized-correlation" => Ok(Method::GenCorr),
            "m4" | "cam" | "additive-model" => Ok(Method::Cam),
            other => Err(Error::Config(format!(
                "unknown method `{other}` (expected M1, M2, M3 or M4)"
            ))),
        }
    }
}

/// One criterion's verdict on one pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionScore {
    pub method: Method,
    /// Summary of the regression `y ~ x` (forward).
    pub score_xy: f64,
    /// Summary of the regression `x ~ y` (backward).
    pub score_yx: f64,
    pub decision: Direction,
    /// Scores were within relative 1e-12; `decision` is the `XtoY`
    /// convention, not evidence.
    pub tie: bool,
}

/// Pearson correlation with a two-sided significance test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PearsonResult {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Pearson correlation of `x` and `y` plus the two-sided p-value of the
/// t statistic `r * sqrt((n-2)/(1-r^2))` with n-2 degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<PearsonResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::TooShort { needed: 3, got: n });
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::Degenerate("x is constant: correlation undefined".into()));
    }
    if syy == 0.0 {
        return Err(Error::Degenerate("y is constant: correlation undefined".into()));
    }
    // single square root of the product loses less precision (exact r
    // for exactly collinear data); fall back to separate roots if the
    // product overflows or underflows
    let product = sxx * syy;
    let denom = if product.is_finite() && product > 0.0 {
        product.sqrt()
    } else {
        sxx.sqrt() * syy.sqrt()
    };
    let r = (sxy / denom).clamp(-1.0, 1.0);
    let p_value = two_sided_t_pvalue(r, n);
    Ok(PearsonResult { r, p_value, n })
}

/// Two-sided p-value for a correlation `r` on `n` observations.
fn two_sided_t_pvalue(r: f64, n: usize) -> f64 {
    let df = n as f64 - 2.0;
    let denom = 1.0 - r * r;
    if denom <= f64::EPSILON {
        return 0.0;
    }
    let t = r * (df / denom).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1 is a valid Student-t");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Generalized measure of correlation: the fraction of `var(y)` explained
/// by the kernel conditional mean of `y` given `x`, clamped to `[0, 1]`.
///
/// Unlike the squared Pearson correlation this sees nonlinear
/// association, and it is asymmetric: `gmc(x, y) != gmc(y, x)` in
/// general.
pub fn gmc(x: &[f64], y: &[f64]) -> Result<f64> {
    let var_y = sample_variance(y)?;
    if var_y == 0.0 {
        return Err(Error::Degenerate("y is constant: explained variance undefined".into()));
    }
    let fit = KernelFit::with_rule_of_thumb(x.to_vec(), y.to_vec())?;
    let residuals = fit.residuals();
    let mse = residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64;
    Ok((1.0 - mse / var_y).clamp(0.0, 1.0))
}

/// Signed square root of [`gmc`]: `sign(pearson r) * sqrt(gmc(x, y))`.
/// Always in `[-1, 1]`.
pub fn generalized_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    let r = pearson(x, y)?.r;
    Ok(r.signum() * gmc(x, y)?.sqrt())
}

/// Additive-model direction score for a residual variance:
/// `-log(max(var, 1e-12)) / 2`. Smaller residual variance gives a
/// higher score.
fn cam_score(residual_variance: f64) -> f64 {
    -0.5 * residual_variance.max(VARIANCE_FLOOR).ln()
}

/// Relative-tolerance tie check shared by all criteria.
fn scores_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(1.0)
}

fn make_score(method: Method, score_xy: f64, score_yx: f64, lower_wins: bool) -> DirectionScore {
    let tie = scores_tied(score_xy, score_yx);
    let forward_wins =
        if lower_wins { score_xy < score_yx } else { score_xy > score_yx };
    let decision = if tie || forward_wins { Direction::XtoY } else { Direction::YtoX };
    DirectionScore { method, score_xy, score_yx, decision, tie }
}

/// Both columns standardized, with degenerate columns rejected by name.
struct StandardizedPair {
    x: Vec<f64>,
    y: Vec<f64>,
}

fn standardized_pair(pair: &PairSample) -> Result<StandardizedPair> {
    let sx = standardize(&pair.x)?;
    if sx.degenerate {
        return Err(Error::Degenerate(format!(
            "pair `{}`: x (column 1) is constant",
            pair.id
        )));
    }
    let sy = standardize(&pair.y)?;
    if sy.degenerate {
        return Err(Error::Degenerate(format!(
            "pair `{}`: y (column 2) is constant",
            pair.id
        )));
    }
    Ok(StandardizedPair { x: sx.values, y: sy.values })
}

/// Aggregates of one regression direction that the criteria consume.
struct SideStats {
    /// Mean |gradient| of the fit at the observations (only when asked).
    mean_abs_gradient: Option<f64>,
    mean_abs_residual: f64,
    mean_sq_residual: f64,
    residual_variance: f64,
    response_variance: f64,
}

fn side_stats(regressor: &[f64], response: &[f64], with_gradient: bool) -> Result<SideStats> {
    let fit = KernelFit::with_rule_of_thumb(regressor.to_vec(), response.to_vec())?;
    let n = fit.len() as f64;
    let (fitted, mean_abs_gradient) = if with_gradient {
        let (fitted, gradients) = fit.fitted_and_gradients();
        let mag = gradients.iter().map(|g| g.abs()).sum::<f64>() / n;
        (fitted, Some(mag))
    } else {
        (fit.fitted(), None)
    };
    let residuals: Vec<f64> =
        response.iter().zip(&fitted).map(|(&yi, &fi)| yi - fi).collect();
    let mean_abs_residual = residuals.iter().map(|r| r.abs()).sum::<f64>() / n;
    let mean_sq_residual = residuals.iter().map(|r| r * r).sum::<f64>() / n;
    let residual_variance = sample_variance(&residuals)?;
    let response_variance = sample_variance(response)?;
    Ok(SideStats {
        mean_abs_gradient,
        mean_abs_residual,
        mean_sq_residual,
        residual_variance,
        response_variance,
    })
}

/// Runs the given criteria on one pair, sharing the two kernel fits.
///
/// Results come back in the order requested. The gradient pass is only
/// computed when M1 is among `methods`. Each individual score is
/// bit-identical to what the single-criterion functions produce.
pub fn decide_methods(pair: &PairSample, methods: &[Method]) -> Result<Vec<DirectionScore>> {
    if methods.is_empty() {
        return Err(Error::Config("no methods requested".into()));
    }
    let std = standardized_pair(pair)?;
    let with_gradient = methods.contains(&Method::Gradient);
    let forward = side_stats(&std.x, &std.y, with_gradient)?;
    let backward = side_stats(&std.y, &std.x, with_gradient)?;
    let scores = methods
        .iter()
        .map(|&method| match method {
            Method::Gradient => make_score(
                method,
                forward.mean_abs_gradient.expect("gradient pass was requested"),
                backward.mean_abs_gradient.expect("gradient pass was requested"),
                true,
            ),
            Method::Residual => {
                make_score(method, forward.mean_abs_residual, backward.mean_abs_residual, true)
            }
            Method::GenCorr => {
                // |r*| in each direction: sqrt of the explained-variance
                // fraction of that direction's fit
                let fwd = explained_fraction(&forward).sqrt();
                let bwd = explained_fraction(&backward).sqrt();
                make_score(method, fwd, bwd, false)
            }
            Method::Cam => make_score(
                method,
                cam_score(forward.residual_variance),
                cam_score(backward.residual_variance),
                false,
            ),
        })
        .collect();
    Ok(scores)
}

fn explained_fraction(stats: &SideStats) -> f64 {
    (1.0 - stats.mean_sq_residual / stats.response_variance).clamp(0.0, 1.0)
}

/// All four criteria on one pair, in M1..M4 order.
pub fn decide_all(pair: &PairSample) -> Result<Vec<DirectionScore>> {
    decide_methods(pair, &Method::ALL)
}

fn decide_one(pair: &PairSample, method: Method) -> Result<DirectionScore> {
    Ok(decide_methods(pair, &[method])?.remove(0))
}

/// M1: the direction whose kernel fit has the smaller mean absolute
/// gradient.
pub fn criterion_gradient(pair: &PairSample) -> Result<DirectionScore> {
    decide_one(pair, Method::Gradient)
}

/// M2: the direction whose kernel fit has the smaller mean absolute
/// residual.
pub fn criterion_residual(pair: &PairSample) -> Result<DirectionScore> {
    decide_one(pair, Method::Residual)
}

/// M3: the direction with the larger generalized-correlation magnitude.
pub fn criterion_gencorr(pair: &PairSample) -> Result<DirectionScore> {
    decide_one(pair, Method::GenCorr)
}

/// M4: the direction with the higher additive-model score.
pub fn criterion_cam(pair: &PairSample) -> Result<DirectionScore> {
    decide_one(pair, Method::Cam)
}
