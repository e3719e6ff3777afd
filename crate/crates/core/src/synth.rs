//! Synthetic additive-noise pairs with known ground truth.
//!
//! `y = f(x) + noise` with `x` drawn from a chosen cause distribution
//! and independent Gaussian noise. The nonlinear mechanisms give
//! identifiable pairs (criteria should recover the direction); the
//! linear mechanism with a Gaussian cause is the classic
//! non-identifiable control. Everything is deterministic in the seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::dataset::{Direction, PairSample};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Functional form of the cause-to-effect mechanism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    Linear,
    Quadratic,
    Cubic,
    Sigmoid,
    Piecewise,
}

impl Mechanism {
    /// The identifiable mechanisms, in suite cycling order.
    pub const NONLINEAR: [Mechanism; 4] =
        [Mechanism::Cubic, Mechanism::Sigmoid, Mechanism::Quadratic, Mechanism::Piecewise];

    /// Applies the mechanism to one cause value.
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Mechanism::Linear => x,
            Mechanism::Quadratic => x * x,
            Mechanism::Cubic => x * x * x,
            // centered logistic 4/(1+e^(-2x)) - 2, amplitude comparable
            // to the other mechanisms so one noise_sd suits the suite
            Mechanism::Sigmoid => 2.0 * x.tanh(),
            Mechanism::Piecewise => {
                if x < 0.0 {
                    0.5 * x
                } else {
                    2.0 * x
                }
            }
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mechanism::Linear => "linear",
            Mechanism::Quadratic => "quadratic",
            Mechanism::Cubic => "cubic",
            Mechanism::Sigmoid => "sigmoid",
            Mechanism::Piecewise => "piecewise",
        }
    }
}

impl std::fmt::Display for Mechanism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Mechanism::Linear),
            "quadratic" => Ok(Mechanism::Quadratic),
            "cubic" => Ok(Mechanism::Cubic),
            "sigmoid" => Ok(Mechanism::Sigmoid),
            "piecewise" => Ok(Mechanism::Piecewise),
            other => Err(Error::Config(format!("unknown mechanism `{other}`"))),
        }
    }
}

/// Distribution of the cause variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CauseDist {
    /// Uniform on (-2, 2).
    Uniform,
    /// Standard normal.
    Gaussian,
}

impl std::fmt::Display for CauseDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CauseDist::Uniform => "uniform",
            CauseDist::Gaussian => "gaussian",
        })
    }
}

impl std::str::FromStr for CauseDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(CauseDist::Uniform),
            "gaussian" | "normal" => Ok(CauseDist::Gaussian),
            other => Err(Error::Config(format!("unknown cause distribution `{other}`"))),
        }
    }
}

/// Parameters for one synthetic pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    /// Observations; at least 10.
    pub n: usize,
    pub mechanism: Mechanism,
    /// Noise standard deviation; strictly positive.
    pub noise_sd: f64,
    pub cause_dist: CauseDist,
    pub seed: u64,
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::Config(format!(
                "synthetic pairs need n >= 10, got {}",
                self.n
            )));
        }
        if !self.noise_sd.is_finite() || self.noise_sd <= 0.0 {
            return Err(Error::Config(format!(
                "noise_sd must be positive and finite, got {}",
                self.noise_sd
            )));
        }
        Ok(())
    }
}

/// Generates one pair: `x ~ cause_dist`, `y = f(x) + Normal(0, noise_sd)`.
/// Ground truth is `XtoY` by construction.
pub fn generate(spec: &SynthSpec) -> Result<PairSample> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let x: Vec<f64> = match spec.cause_dist {
        CauseDist::Uniform => {
            let dist = Uniform::new(-2.0, 2.0).expect("valid uniform bounds");
            (0..spec.n).map(|_| dist.sample(&mut rng)).collect()
        }
        CauseDist::Gaussian => {
            let dist = Normal::new(0.0, 1.0).expect("valid normal parameters");
            (0..spec.n).map(|_| dist.sample(&mut rng)).collect()
        }
    };
    let noise = Normal::new(0.0, spec.noise_sd).expect("validated noise_sd");
    let y: Vec<f64> =
        x.iter().map(|&v| spec.mechanism.apply(v) + noise.sample(&mut rng)).collect();
    PairSample::new(
        format!("{}-{}", spec.mechanism, spec.seed),
        x,
        y,
        Some(Direction::XtoY),
        1.0,
    )
}

/// Shape of a generated suite (everything but count and seed).
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub n: usize,
    pub noise_sd: f64,
    pub cause_dist: CauseDist,
    /// Cycled over the suite in order.
    pub mechanisms: Vec<Mechanism>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: 500,
            noise_sd: 0.2,
            cause_dist: CauseDist::Uniform,
            mechanisms: Mechanism::NONLINEAR.to_vec(),
        }
    }
}

/// A benchmark suite with both classes present: `count` pairs cycling
/// the configured mechanisms, per-pair seeds derived from `base_seed`,
/// every second pair column-swapped so its ground truth is `YtoX`.
pub fn generate_suite_with(
    count: usize,
    base_seed: u64,
    config: &SuiteConfig,
) -> Result<Vec<PairSample>> {
    if config.mechanisms.is_empty() {
        return Err(Error::Config("suite needs at least one mechanism".into()));
    }
    (0..count)
        .map(|i| {
            let spec = SynthSpec {
                n: config.n,
                mechanism: config.mechanisms[i % config.mechanisms.len()],
                noise_sd: config.noise_sd,
                cause_dist: config.cause_dist,
                seed: derive_seed(base_seed, "suite", i as u64),
            };
            let mut sample = generate(&spec)?;
            if i % 2 == 1 {
                sample = sample.swapped();
            }
            sample.id = format!("synth{:04}", i + 1);
            Ok(sample)
        })
        .collect()
}

/// [`generate_suite_with`] under the default nonlinear suite shape
/// (n=500, noise_sd=0.2, uniform cause).
pub fn generate_suite(count: usize, base_seed: u64) -> Vec<PairSample> {
    generate_suite_with(count, base_seed, &SuiteConfig::default())
        .expect("default suite configuration is valid")
}

/// The pair's data in pair-file format: one `x y` row per observation,
/// full shortest-round-trip precision.
pub fn pair_file_text(sample: &PairSample) -> String {
    let mut text = String::new();
    for (x, y) in sample.x.iter().zip(&sample.y) {
        text.push_str(&format!("{x} {y}\n"));
    }
    text
}

/// The pair's metadata line (including trailing newline), pointing the
/// cause range at whichever column holds it.
pub fn metadata_line(sample: &PairSample) -> Result<String> {
    let truth = sample.ground_truth.ok_or_else(|| {
        Error::Config(format!("pair `{}` has no ground truth to encode", sample.id))
    })?;
    let line = match truth {
        Direction::XtoY => format!("{} 1 1 2 2 {}\n", sample.id, sample.weight),
        Direction::YtoX => format!("{} 2 2 1 1 {}\n", sample.id, sample.weight),
    };
    Ok(line)
}
