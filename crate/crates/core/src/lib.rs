//! Causal direction between two continuous variables under the bivariate
//! linear non-Gaussian acyclic model.
//!
//! Instead of testing the noise for non-Gaussianity up front, the detector
//! regresses each variable on the other and runs a kernel (HSIC)
//! independence test between each regressor and its residual. In the linear
//! acyclic setting the reverse-model residual is independent of its regressor
//! exactly when the forward noise is Gaussian, so the two test outcomes both
//! diagnose the noise and, when it is non-Gaussian, identify the direction.
//!
//! ```no_run
//! use lingam_core::prelude::*;
//!
//! let sample = generate(&GenSpec::new(1600, NoiseKind::LAPLACE, 7)).unwrap();
//! let report = gauss_detect(&sample, &IndependenceTestConfig::default()).unwrap();
//! assert_eq!(report.verdict, Verdict::XtoY);
//! ```

pub mod datagen;
pub mod detector;
pub mod error;
pub mod experiments;
pub mod hypothesis;
pub mod regression;
pub mod seed;
pub mod series;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::datagen::{generate, sample_noise, GenSpec, NoiseKind};
    pub use crate::detector::{
        decide, gauss_detect, pairwise_baseline, Algorithm, DirectionReport, Verdict,
    };
    pub use crate::error::{Error, Result};
    pub use crate::experiments::{
        run_consistency, run_sweep, run_tpd, ConsistencyReport, ExperimentConfig, TpdReport,
    };
    pub use crate::hypothesis::{
        anderson_darling_test, hsic_statistic, independence_test, jarque_bera_test,
        median_heuristic_bandwidth, GaussianityTest, IndependenceMethod, IndependenceTestConfig,
        TestDecision, TestKind,
    };
    pub use crate::regression::{fit, Direction, ModelPair, RegressionFit};
    pub use crate::series::{standardize, PairedSample, Series, StandardizedSeries};
}
