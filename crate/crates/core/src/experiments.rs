//! Batch experiments over (noise family, sample size) cells.
//!
//! Each batch is a freshly generated sample whose seed depends only on
//! `(master_seed, noise, n, batch)`. Every batch runs the Gaussianity test on
//! the forward residual and the independence tests on the fitted residuals;
//! the consistency-rate and tests-per-decision reports are both projections
//! of those per-batch records.

use serde::Serialize;

use crate::datagen::{generate, GenSpec, NoiseKind, MIN_GENERATE_N};
use crate::detector::{decide, independence_pair, reverse_independence, Algorithm, Verdict};
use crate::error::{Error, Result};
use crate::hypothesis::{check_alpha, GaussianityTest, IndependenceTestConfig, TestDecision};
use crate::regression::ModelPair;
use crate::seed::derive_seed;

pub const MIN_BATCHES: usize = 10;
/// A cell with more than this fraction of excluded batches is invalid.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.10;

const DETECT_STREAM: u64 = 0xDE7E_C700_0000_0001;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub sample_sizes: Vec<usize>,
    pub noise_kinds: Vec<NoiseKind>,
    pub batches: usize,
    /// Significance level for every test; overrides `it_cfg.alpha`.
    pub alpha: f64,
    pub it_cfg: IndependenceTestConfig,
    pub gt: GaussianityTest,
    pub slope: f64,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sample_sizes: vec![400, 800, 1600],
            noise_kinds: NoiseKind::ALL.to_vec(),
            batches: 100,
            alpha: 0.05,
            it_cfg: IndependenceTestConfig::default(),
            gt: GaussianityTest::JarqueBera,
            slope: 2.0,
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        self.independence_config().validate()?;
        if self.batches < MIN_BATCHES {
            return Err(Error::InvalidConfig(format!(
                "at least {MIN_BATCHES} batches required, got {}",
                self.batches
            )));
        }
        if self.sample_sizes.is_empty() || self.noise_kinds.is_empty() {
            return Err(Error::InvalidConfig(
                "need at least one sample size and one noise kind".into(),
            ));
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < MIN_GENERATE_N) {
            return Err(Error::InvalidConfig(format!(
                "sample sizes must be at least {MIN_GENERATE_N}, got {n}"
            )));
        }
        if !self.slope.is_finite() {
            return Err(Error::InvalidConfig("slope must be finite".into()));
        }
        self.noise_kinds.iter().try_for_each(NoiseKind::validate)
    }

    pub fn independence_config(&self) -> IndependenceTestConfig {
        IndependenceTestConfig {
            alpha: self.alpha,
            ..self.it_cfg
        }
    }

    /// Seed of the generated sample for one batch of one cell.
    pub fn batch_seed(&self, noise: NoiseKind, n: usize, batch: usize) -> u64 {
        derive_seed(self.master_seed, &[noise.tag(), n as u64, batch as u64])
    }

    /// Master seed handed to the detector for that batch.
    pub fn detection_seed(&self, noise: NoiseKind, n: usize, batch: usize) -> u64 {
        derive_seed(self.batch_seed(noise, n, batch), &[DETECT_STREAM])
    }

    pub fn gen_spec(&self, noise: NoiseKind, n: usize, batch: usize) -> GenSpec {
        GenSpec {
            n,
            slope: self.slope,
            noise,
            seed: self.batch_seed(noise, n, batch),
        }
    }
}

/// Test outcomes for one batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchRecord {
    pub batch: usize,
    pub seed: u64,
    /// Gaussianity of the forward residual `e_y`.
    pub gaussianity: TestDecision,
    /// `x` independent of `e_y`; only computed by full sweeps.
    pub h10: Option<TestDecision>,
    /// `y` independent of `e_x`.
    pub h20: TestDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcludedBatch {
    pub batch: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub noise: NoiseKind,
    pub n: usize,
    pub batches: usize,
    pub records: Vec<BatchRecord>,
    pub excluded: Vec<ExcludedBatch>,
}

impl SweepCell {
    pub fn is_valid(&self) -> bool {
        is_valid(self.batches, self.excluded.len())
    }
}

fn is_valid(batches: usize, excluded: usize) -> bool {
    batches > 0 && (excluded as f64) <= MAX_EXCLUDED_FRACTION * batches as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
}

fn run_batch(
    cfg: &ExperimentConfig,
    noise: NoiseKind,
    n: usize,
    batch: usize,
    full: bool,
) -> Result<BatchRecord> {
    let spec = cfg.gen_spec(noise, n, batch);
    let sample = generate(&spec)?;
    let models = ModelPair::from_raw(&sample)?;
    let gaussianity = cfg.gt.run(&models.forward.residuals, cfg.alpha)?;
    let it_cfg = cfg
        .independence_config()
        .with_seed(cfg.detection_seed(noise, n, batch));
    let (h10, h20) = if full {
        let (h10, h20) = independence_pair(&models, &it_cfg)?;
        (Some(h10), h20)
    } else {
        (None, reverse_independence(&models, &it_cfg)?)
    };
    Ok(BatchRecord {
        batch,
        seed: spec.seed,
        gaussianity,
        h10,
        h20,
    })
}

fn run_cell(cfg: &ExperimentConfig, noise: NoiseKind, n: usize, full: bool) -> SweepCell {
    let one = |batch: usize| (batch, run_batch(cfg, noise, n, batch, full));

    #[cfg(feature = "parallel")]
    let outcomes: Vec<_> = {
        use rayon::prelude::*;
        (0..cfg.batches).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<_> = (0..cfg.batches).map(one).collect();

    let mut records = Vec::with_capacity(outcomes.len());
    let mut excluded = Vec::new();
    for (batch, outcome) in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(e) => excluded.push(ExcludedBatch {
                batch,
                reason: e.to_string(),
            }),
        }
    }
    SweepCell {
        noise,
        n,
        batches: cfg.batches,
        records,
        excluded,
    }
}

fn sweep(cfg: &ExperimentConfig, full: bool) -> Result<SweepReport> {
    cfg.validate()?;
    let cells = cfg
        .noise_kinds
        .iter()
        .flat_map(|&noise| cfg.sample_sizes.iter().map(move |&n| (noise, n)))
        .map(|(noise, n)| run_cell(cfg, noise, n, full))
        .collect();
    Ok(SweepReport { cells })
}

/// Runs every test on every batch of every cell.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    sweep(cfg, true)
}

/// Agreement between the Gaussianity decision on `e_y` and the
/// independence decision on `(y, e_x)`.
pub fn run_consistency(cfg: &ExperimentConfig) -> Result<ConsistencyReport> {
    Ok(sweep(cfg, false)?.consistency())
}

/// Tests per decision of both algorithms on shared samples.
pub fn run_tpd(cfg: &ExperimentConfig) -> Result<TpdReport> {
    Ok(run_sweep(cfg)?.tpd())
}

/// One plottable number: `(noise, n, metric, value)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongRow {
    pub noise: String,
    pub n: usize,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConsistencyRow {
    pub batch: usize,
    pub gt_phi: u8,
    pub it_phi: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyCell {
    pub noise: NoiseKind,
    pub n: usize,
    pub batches: usize,
    pub excluded: Vec<ExcludedBatch>,
    /// Matches over evaluated batches; 0 when nothing was evaluated.
    pub consistency_rate: f64,
    pub rows: Vec<ConsistencyRow>,
    pub valid: bool,
}

impl ConsistencyCell {
    pub fn from_rows(
        noise: NoiseKind,
        n: usize,
        batches: usize,
        rows: Vec<ConsistencyRow>,
        excluded: Vec<ExcludedBatch>,
    ) -> Self {
        let matches = rows.iter().filter(|r| r.gt_phi == r.it_phi).count();
        let consistency_rate = if rows.is_empty() {
            0.0
        } else {
            matches as f64 / rows.len() as f64
        };
        let valid = !rows.is_empty() && is_valid(batches, excluded.len());
        Self {
            noise,
            n,
            batches,
            excluded,
            consistency_rate,
            rows,
            valid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub cells: Vec<ConsistencyCell>,
}

impl ConsistencyReport {
    pub fn cell(&self, noise: NoiseKind, n: usize) -> Option<&ConsistencyCell> {
        self.cells.iter().find(|c| c.noise == noise && c.n == n)
    }

    pub fn all_valid(&self) -> bool {
        self.cells.iter().all(|c| c.valid)
    }

    pub fn long_rows(&self) -> Vec<LongRow> {
        let mut out = Vec::new();
        for c in &self.cells {
            let row = |metric: &str, value: f64| LongRow {
                noise: c.noise.name().to_string(),
                n: c.n,
                metric: metric.to_string(),
                value,
            };
            out.push(row("consistency_rate", c.consistency_rate));
            out.push(row("evaluated_batches", c.rows.len() as f64));
            out.push(row("excluded_batches", c.excluded.len() as f64));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub x_to_y: usize,
    pub y_to_x: usize,
    pub gaussian_noise: usize,
    pub inconclusive: usize,
}

impl VerdictCounts {
    pub fn add(&mut self, v: Verdict) {
        *self.get_mut(v) += 1;
    }

    fn get_mut(&mut self, v: Verdict) -> &mut usize {
        match v {
            Verdict::XtoY => &mut self.x_to_y,
            Verdict::YtoX => &mut self.y_to_x,
            Verdict::GaussianNoise => &mut self.gaussian_noise,
            Verdict::Inconclusive => &mut self.inconclusive,
        }
    }

    pub fn get(&self, v: Verdict) -> usize {
        match v {
            Verdict::XtoY => self.x_to_y,
            Verdict::YtoX => self.y_to_x,
            Verdict::GaussianNoise => self.gaussian_noise,
            Verdict::Inconclusive => self.inconclusive,
        }
    }

    pub fn total(&self) -> usize {
        self.x_to_y + self.y_to_x + self.gaussian_noise + self.inconclusive
    }

    pub fn fraction(&self, v: Verdict) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.get(v) as f64 / t as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TpdCell {
    pub noise: NoiseKind,
    pub n: usize,
    pub algorithm: Algorithm,
    pub batches: usize,
    pub excluded: usize,
    pub mean_tpd: f64,
    pub verdicts: VerdictCounts,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TpdReport {
    pub cells: Vec<TpdCell>,
}

impl TpdReport {
    pub fn cell(&self, noise: NoiseKind, n: usize, algorithm: Algorithm) -> Option<&TpdCell> {
        self.cells
            .iter()
            .find(|c| c.noise == noise && c.n == n && c.algorithm == algorithm)
    }

    pub fn all_valid(&self) -> bool {
        self.cells.iter().all(|c| c.valid)
    }

    pub fn long_rows(&self) -> Vec<LongRow> {
        let mut out = Vec::new();
        for c in &self.cells {
            let alg = c.algorithm.as_str();
            let row = |metric: String, value: f64| LongRow {
                noise: c.noise.name().to_string(),
                n: c.n,
                metric,
                value,
            };
            out.push(row(format!("{alg}.mean_tpd"), c.mean_tpd));
            for v in Verdict::ALL {
                out.push(row(format!("{alg}.verdict.{v}"), c.verdicts.get(v) as f64));
            }
        }
        out
    }
}

impl SweepReport {
    pub fn consistency(&self) -> ConsistencyReport {
        let cells = self
            .cells
            .iter()
            .map(|c| {
                let rows = c
                    .records
                    .iter()
                    .map(|r| ConsistencyRow {
                        batch: r.batch,
                        gt_phi: r.gaussianity.phi,
                        it_phi: r.h20.phi,
                    })
                    .collect();
                ConsistencyCell::from_rows(c.noise, c.n, c.batches, rows, c.excluded.clone())
            })
            .collect();
        ConsistencyReport { cells }
    }

    /// # Panics
    ///
    /// If the sweep was run without the `H10` tests.
    pub fn tpd(&self) -> TpdReport {
        let mut cells = Vec::with_capacity(self.cells.len() * 2);
        for c in &self.cells {
            let mut gd = VerdictCounts::default();
            let mut base = VerdictCounts::default();
            let mut base_tests = 0u64;
            for r in &c.records {
                let h10 = r.h10.expect("tpd needs a full sweep");
                let pair_verdict = decide(h10.accepted(), r.h20.accepted());
                gd.add(pair_verdict);
                if r.gaussianity.reject {
                    base.add(pair_verdict);
                    base_tests += 3;
                } else {
                    base.add(Verdict::GaussianNoise);
                    base_tests += 1;
                }
            }
            let evaluated = c.records.len();
            let mean = |tests: u64| {
                if evaluated == 0 {
                    0.0
                } else {
                    tests as f64 / evaluated as f64
                }
            };
            let valid = evaluated > 0 && c.is_valid();
            for (algorithm, verdicts, tests) in [
                (Algorithm::GaussDetect, gd, 2 * evaluated as u64),
                (Algorithm::PairwiseBaseline, base, base_tests),
            ] {
                cells.push(TpdCell {
                    noise: c.noise,
                    n: c.n,
                    algorithm,
                    batches: c.batches,
                    excluded: c.excluded.len(),
                    mean_tpd: mean(tests),
                    verdicts,
                    valid,
                });
            }
        }
        TpdReport { cells }
    }
}
