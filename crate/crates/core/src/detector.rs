//! Causal direction detection for a pair of variables.
//!
//! [`gauss_detect`] replaces the usual "check non-Gaussianity first" step by
//! two kernel independence tests on the regression residuals:
//!
//! * `H10`: `x` is independent of the forward residual `e_y`,
//! * `H20`: `y` is independent of the reverse residual `e_x`.
//!
//! The pair of accept/reject outcomes maps onto four verdicts (see
//! [`decide`]). [`pairwise_baseline`] is the classical order: a Gaussianity
//! test on `e_y` first, and the independence tests only if Gaussianity is
//! rejected.

use std::fmt;

use serde::Serialize;

use crate::error::{require_len, Result};
use crate::hypothesis::{
    check_alpha, independence_test, GaussianityTest, IndependenceTestConfig, TestDecision,
};
use crate::regression::{Direction, ModelPair};
use crate::seed::{derive_seed, fingerprint};
use crate::series::{PairedSample, Series};

pub const MIN_DETECT_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    XtoY,
    YtoX,
    /// Both residuals behave as Gaussian; the direction is not identifiable.
    GaussianNoise,
    /// Both independence nulls rejected.
    Inconclusive,
}

impl Verdict {
    pub const ALL: [Verdict; 4] = [
        Verdict::XtoY,
        Verdict::YtoX,
        Verdict::GaussianNoise,
        Verdict::Inconclusive,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::XtoY => "XtoY",
            Verdict::YtoX => "YtoX",
            Verdict::GaussianNoise => "GaussianNoise",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Algorithm {
    GaussDetect,
    PairwiseBaseline,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::GaussDetect => "gauss_detect",
            Algorithm::PairwiseBaseline => "pairwise_baseline",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionReport {
    pub algorithm: Algorithm,
    pub verdict: Verdict,
    /// `x` independent of `e_y`. Absent when the baseline stopped early.
    pub h10: Option<TestDecision>,
    /// `y` independent of `e_x`. Absent when the baseline stopped early.
    pub h20: Option<TestDecision>,
    pub gaussianity: Option<TestDecision>,
    pub tests_performed: u32,
    pub forward_slope: f64,
    pub reverse_slope: f64,
}

/// Maps the two independence outcomes to a verdict.
pub fn decide(h10_accept: bool, h20_accept: bool) -> Verdict {
    match (h10_accept, h20_accept) {
        (true, false) => Verdict::XtoY,
        (false, true) => Verdict::YtoX,
        (true, true) => Verdict::GaussianNoise,
        (false, false) => Verdict::Inconclusive,
    }
}

/// Seed for the independence test whose predictor is `predictor`.
///
/// Keying the stream on the predictor's bits gives the two tests distinct
/// streams, and makes the test of a given (predictor, residual) pair draw the
/// same permutations whichever column it was passed in.
pub fn test_seed(master: u64, predictor: &Series) -> u64 {
    derive_seed(master, &[fingerprint(predictor.as_slice())])
}

/// Runs the `H10` and `H20` independence tests on fitted models.
pub fn independence_pair(
    models: &ModelPair,
    cfg: &IndependenceTestConfig,
) -> Result<(TestDecision, TestDecision)> {
    let h10 = residual_test(models, cfg, Direction::Forward)?;
    let h20 = residual_test(models, cfg, Direction::Reverse)?;
    Ok((h10, h20))
}

/// Tests the regressor of one fitted direction against its residual.
fn residual_test(
    models: &ModelPair,
    cfg: &IndependenceTestConfig,
    direction: Direction,
) -> Result<TestDecision> {
    let (predictor, residual) = match direction {
        Direction::Forward => (models.standardized.x(), &models.forward.residuals),
        Direction::Reverse => (models.standardized.y(), &models.reverse.residuals),
    };
    let cfg = cfg.with_seed(test_seed(cfg.rng_seed, predictor));
    independence_test(predictor, residual, &cfg)
}

/// `H20` alone: `y` independent of the reverse residual.
pub fn reverse_independence(
    models: &ModelPair,
    cfg: &IndependenceTestConfig,
) -> Result<TestDecision> {
    residual_test(models, cfg, Direction::Reverse)
}

pub(crate) fn gauss_detect_report(
    models: &ModelPair,
    h10: TestDecision,
    h20: TestDecision,
) -> DirectionReport {
    DirectionReport {
        algorithm: Algorithm::GaussDetect,
        verdict: decide(h10.accepted(), h20.accepted()),
        h10: Some(h10),
        h20: Some(h20),
        gaussianity: None,
        tests_performed: 2,
        forward_slope: models.forward.slope,
        reverse_slope: models.reverse.slope,
    }
}

pub(crate) fn baseline_report(
    models: &ModelPair,
    gaussianity: TestDecision,
    pair: Option<(TestDecision, TestDecision)>,
) -> DirectionReport {
    let (verdict, h10, h20, tests_performed) = match pair {
        Some((h10, h20)) if gaussianity.reject => (
            decide(h10.accepted(), h20.accepted()),
            Some(h10),
            Some(h20),
            3,
        ),
        _ => (Verdict::GaussianNoise, None, None, 1),
    };
    DirectionReport {
        algorithm: Algorithm::PairwiseBaseline,
        verdict,
        h10,
        h20,
        gaussianity: Some(gaussianity),
        tests_performed,
        forward_slope: models.forward.slope,
        reverse_slope: models.reverse.slope,
    }
}

/// Standardize, fit both directions, test both residuals, decide.
pub fn gauss_detect(sample: &PairedSample, cfg: &IndependenceTestConfig) -> Result<DirectionReport> {
    cfg.validate()?;
    require_len(sample.len(), MIN_DETECT_N)?;
    let models = ModelPair::from_raw(sample)?;
    let (h10, h20) = independence_pair(&models, cfg)?;
    Ok(gauss_detect_report(&models, h10, h20))
}

/// Gaussianity test on `e_y` first; independence tests only if it rejects.
pub fn pairwise_baseline(
    sample: &PairedSample,
    it_cfg: &IndependenceTestConfig,
    gt: GaussianityTest,
    alpha: f64,
) -> Result<DirectionReport> {
    it_cfg.validate()?;
    check_alpha(alpha)?;
    require_len(sample.len(), MIN_DETECT_N)?;
    let models = ModelPair::from_raw(sample)?;
    let gaussianity = gt.run(&models.forward.residuals, alpha)?;
    let pair = if gaussianity.reject {
        Some(independence_pair(&models, it_cfg)?)
    } else {
        None
    };
    Ok(baseline_report(&models, gaussianity, pair))
}
