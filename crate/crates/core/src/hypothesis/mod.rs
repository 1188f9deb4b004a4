//! Hypothesis tests: kernel independence (HSIC) and Gaussianity (Jarque–Bera,
//! Anderson–Darling).
//!
//! Every test produces a [`TestDecision`]. The binary decision variable `phi`
//! follows the convention that 1 means "null not rejected" and 0 means
//! "null rejected".

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub mod hsic;
pub mod normality;

pub use hsic::{
    hsic_statistic, independence_test, median_heuristic_bandwidth, permutation_null,
    PermutationNull,
};
pub use normality::{
    anderson_darling_statistic, anderson_darling_test, jarque_bera_statistic, jarque_bera_test,
};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_PERMUTATIONS: usize = 500;
pub const MIN_RANDOM_PERMUTATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestKind {
    Independence,
    Gaussianity,
}

/// Outcome of a single hypothesis test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestDecision {
    pub kind: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub phi: u8,
}

impl TestDecision {
    pub fn new(kind: TestKind, statistic: f64, p_value: f64, alpha: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        let reject = p_value < alpha;
        Self {
            kind,
            statistic,
            p_value,
            alpha,
            reject,
            phi: u8::from(!reject),
        }
    }

    /// The null hypothesis was not rejected.
    pub fn accepted(&self) -> bool {
        !self.reject
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IndependenceMethod {
    /// Monte-Carlo permutation null with the add-one p-value.
    PermutationHsic,
    /// Gamma approximation to the null, moment-matched in closed form.
    GammaHsic,
    /// Every permutation of `y` enumerated; exact p-value. Small `n` only.
    ExhaustiveHsic,
}

impl IndependenceMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            IndependenceMethod::PermutationHsic => "perm",
            IndependenceMethod::GammaHsic => "gamma",
            IndependenceMethod::ExhaustiveHsic => "exhaustive",
        }
    }
}

impl fmt::Display for IndependenceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IndependenceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "perm" | "permutation" => Ok(Self::PermutationHsic),
            "gamma" => Ok(Self::GammaHsic),
            "exhaustive" => Ok(Self::ExhaustiveHsic),
            other => Err(Error::InvalidConfig(format!(
                "unknown independence method `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum BandwidthRule {
    #[default]
    MedianHeuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndependenceTestConfig {
    pub method: IndependenceMethod,
    pub permutations: usize,
    pub bandwidth_rule: BandwidthRule,
    pub alpha: f64,
    pub rng_seed: u64,
}

impl Default for IndependenceTestConfig {
    fn default() -> Self {
        Self {
            method: IndependenceMethod::PermutationHsic,
            permutations: DEFAULT_PERMUTATIONS,
            bandwidth_rule: BandwidthRule::MedianHeuristic,
            alpha: DEFAULT_ALPHA,
            rng_seed: 0,
        }
    }
}

impl IndependenceTestConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.method == IndependenceMethod::PermutationHsic
            && self.permutations < MIN_RANDOM_PERMUTATIONS
        {
            return Err(Error::InvalidConfig(format!(
                "at least {MIN_RANDOM_PERMUTATIONS} permutations required, got {}",
                self.permutations
            )));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }
}

/// Which Gaussianity test a baseline runs on the forward residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum GaussianityTest {
    #[default]
    JarqueBera,
    AndersonDarling,
}

impl GaussianityTest {
    pub fn run(&self, s: &crate::series::Series, alpha: f64) -> Result<TestDecision> {
        match self {
            GaussianityTest::JarqueBera => jarque_bera_test(s, alpha),
            GaussianityTest::AndersonDarling => anderson_darling_test(s, alpha),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            GaussianityTest::JarqueBera => "jb",
            GaussianityTest::AndersonDarling => "ad",
        }
    }
}

impl fmt::Display for GaussianityTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GaussianityTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jb" | "jarque-bera" => Ok(Self::JarqueBera),
            "ad" | "anderson-darling" => Ok(Self::AndersonDarling),
            other => Err(Error::InvalidConfig(format!(
                "unknown Gaussianity test `{other}`"
            ))),
        }
    }
}
