//! Causal direction discovery for bivariate data.
//!
//! Given observations of two variables, the question is which one causes
//! the other. Under an additive-noise model `effect = f(cause) + noise`
//! the regression in the causal direction is simpler than its reverse,
//! and several one-number summaries of "simpler" turn that asymmetry into
//! a decision rule. This crate implements four such criteria on top of a
//! shared Nadaraya-Watson kernel regression ([`criteria`], [`kernelreg`]),
//! combines them by majority vote with a leader tie-break ([`ensemble`]),
//! attaches a bootstrap certainty to each verdict ([`bootstrap`]), and
//! provides the surrounding benchmark machinery: pair-file loading with
//! exclusion rules ([`dataset`]), synthetic pair generation with known
//! ground truth ([`synth`]), evaluation metrics and record filters
//! ([`metrics`]), and a parallel per-dataset driver ([`pipeline`]).
//!
//! Everything randomized is seeded and deterministic, including across
//! worker counts.

pub mod bootstrap;
pub mod criteria;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod kernelreg;
pub mod metrics;
pub mod pipeline;
pub mod seed;
pub mod synth;

pub use dataset::{Direction, PairSample};
pub use error::{Error, Result};
