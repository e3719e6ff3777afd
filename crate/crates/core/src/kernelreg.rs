//! Nadaraya-Watson kernel regression with a Gaussian kernel.
//!
//! This is the nonparametric regression every direction criterion is
//! built on: the conditional mean is a kernel-weighted average of the
//! responses, its derivative follows from the quotient rule on the two
//! kernel sums, and the bandwidth comes from a rule of thumb on the
//! regressor's spread. Exact O(n^2) evaluation, no approximation.

use crate::error::{Error, Result};

/// Gaussian kernel weight for a query at distance `x0 - xi` and
/// bandwidth `h`: exp(-((x0-xi)/h)^2 / 2).
#[inline]
fn kernel(x0: f64, xi: f64, h: f64) -> f64 {
    let u = (x0 - xi) / h;
    (-0.5 * u * u).exp()
}

/// Rule-of-thumb bandwidth: `1.06 * min(sd, IQR/1.34) * n^(-1/5)`.
///
/// `sd` is the sample standard deviation (n-1); the IQR uses the
/// inverse-ECDF quantile with averaging at jump points. A zero IQR
/// (heavily tied data) falls back to the sd alone; a zero sd is an
/// error because no bandwidth can be formed.
pub fn rule_of_thumb_bandwidth(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: x.len() });
    }
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    let sd = (ss / (n - 1.0)).sqrt();
    if sd == 0.0 {
        return Err(Error::Degenerate("constant regressor: bandwidth undefined".into()));
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(1.06 * spread * n.powf(-0.2))
}

/// Empirical quantile of an ascending-sorted slice: inverse ECDF,
/// averaging the two adjacent order statistics when `n*p` lands on an
/// integer.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let pos = n as f64 * p;
    let rounded = pos.round();
    if (pos - rounded).abs() < 1e-9 {
        let k = rounded as usize;
        if k >= 1 && k < n {
            return 0.5 * (sorted[k - 1] + sorted[k]);
        }
    }
    let k = (pos.ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

/// A fitted kernel regression of `y` on `x`.
///
/// Invariants: equal lengths >= 3, all values finite, bandwidth positive
/// and finite. Predictions are clamped to the observed response range,
/// so no query can produce a value outside `[min(y), max(y)]`.
#[derive(Clone, Debug)]
pub struct KernelFit {
    x: Vec<f64>,
    y: Vec<f64>,
    bandwidth: f64,
    y_min: f64,
    y_max: f64,
}

impl KernelFit {
    pub fn new(x: Vec<f64>, y: Vec<f64>, bandwidth: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
        }
        if x.len() < 3 {
            return Err(Error::TooShort { needed: 3, got: x.len() });
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("kernel fit data".into()));
        }
        if !bandwidth.is_finite() || bandwidth <= 0.0 {
            return Err(Error::Config(format!(
                "bandwidth must be positive and finite, got {bandwidth}"
            )));
        }
        let (y_min, y_max) = y
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        Ok(KernelFit { x, y, bandwidth, y_min, y_max })
    }

    /// Builds the fit with the rule-of-thumb bandwidth of `x`.
    pub fn with_rule_of_thumb(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let h = rule_of_thumb_bandwidth(&x)?;
        KernelFit::new(x, y, h)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Estimated conditional mean at `x0`.
    ///
    /// Far outside the data every kernel weight underflows to zero; the
    /// response of the nearest observation is returned instead of 0/0.
    pub fn predict(&self, x0: f64) -> f64 {
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        for (&xi, &yi) in self.x.iter().zip(&self.y) {
            let k = kernel(x0, xi, self.bandwidth);
            s0 += k;
            s1 += k * yi;
        }
        if s0 == 0.0 {
            return self.nearest_response(x0);
        }
        (s1 / s0).clamp(self.y_min, self.y_max)
    }

    /// Derivative of [`predict`](Self::predict) at `x0`, by the quotient
    /// rule on the kernel sums. Where the weight sum underflows (far
    /// outside the data) a central difference with step `h/100` over the
    /// nearest-neighbor extension is used instead.
    pub fn gradient(&self, x0: f64) -> f64 {
        let h = self.bandwidth;
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for (&xi, &yi) in self.x.iter().zip(&self.y) {
            let k = kernel(x0, xi, h);
            let dk = -k * (x0 - xi) / (h * h);
            s0 += k;
            s1 += k * yi;
            d0 += dk;
            d1 += dk * yi;
        }
        if s0 == 0.0 {
            let step = h / 100.0;
            return (self.predict(x0 + step) - self.predict(x0 - step)) / (2.0 * step);
        }
        (d1 * s0 - s1 * d0) / (s0 * s0)
    }

    fn nearest_response(&self, x0: f64) -> f64 {
        let mut best = 0usize;
        let mut best_dist = f64::INFINITY;
        for (i, &xi) in self.x.iter().enumerate() {
            let d = (x0 - xi).abs();
            if d < best_dist {
                best_dist = d;
                best = i;
            }
        }
        self.y[best]
    }

    /// Fitted values at the observations themselves.
    ///
    /// In-sample queries can never hit the underflow fallback: each
    /// observation contributes weight 1 to its own query.
    pub fn fitted(&self) -> Vec<f64> {
        self.x.iter().map(|&x0| self.predict(x0)).collect()
    }

    /// Residuals `y - fitted` at the observations.
    pub fn residuals(&self) -> Vec<f64> {
        self.y.iter().zip(self.fitted()).map(|(&yi, fi)| yi - fi).collect()
    }

    /// Fitted values and gradients at the observations in one pass.
    ///
    /// Accumulates the kernel sums in the same order as `predict` and
    /// `gradient`, so the results are bit-identical to calling those
    /// per point.
    pub fn fitted_and_gradients(&self) -> (Vec<f64>, Vec<f64>) {
        let h = self.bandwidth;
        let mut fitted = Vec::with_capacity(self.len());
        let mut gradients = Vec::with_capacity(self.len());
        for &x0 in &self.x {
            let mut s0 = 0.0;
            let mut s1 = 0.0;
            let mut d0 = 0.0;
            let mut d1 = 0.0;
            for (&xi, &yi) in self.x.iter().zip(&self.y) {
                let k = kernel(x0, xi, h);
                let dk = -k * (x0 - xi) / (h * h);
                s0 += k;
                s1 += k * yi;
                d0 += dk;
                d1 += dk * yi;
            }
            // s0 >= 1 in-sample (own weight), so no fallback branch here
            fitted.push((s1 / s0).clamp(self.y_min, self.y_max));
            gradients.push((d1 * s0 - s1 * d0) / (s0 * s0));
        }
        (fitted, gradients)
    }
}
