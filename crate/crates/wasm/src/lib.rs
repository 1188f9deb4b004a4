//! Browser bindings. Every export takes plain numbers and strings and returns
//! a JSON string; the `*_json` functions hold the logic so native tests can
//! call them without a JavaScript host.

use lingam_core::detector::test_seed;
use lingam_core::hypothesis::permutation_null;
use lingam_core::prelude::{
    gauss_detect, generate, Error, GenSpec, IndependenceTestConfig, ModelPair, NoiseKind,
    PairedSample, TestDecision,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest sample the page accepts; the permutation null holds two n x n matrices.
pub const MAX_N: usize = 3000;

#[derive(Serialize)]
struct SimulateOut<'a> {
    x: &'a [f64],
    y: &'a [f64],
}

#[derive(Serialize)]
struct TestOut {
    statistic: f64,
    p_value: f64,
    reject: bool,
}

impl From<&TestDecision> for TestOut {
    fn from(d: &TestDecision) -> Self {
        Self {
            statistic: d.statistic,
            p_value: d.p_value,
            reject: d.reject,
        }
    }
}

#[derive(Serialize)]
struct DetectOut<'a> {
    verdict: &'static str,
    h10: TestOut,
    h20: TestOut,
    slope: f64,
    /// Standardized columns and the residuals of each fitted direction.
    x: &'a [f64],
    y: &'a [f64],
    residual_y: &'a [f64],
    residual_x: &'a [f64],
}

#[derive(Serialize)]
struct NullOut<'a> {
    observed: f64,
    p_value: f64,
    statistics: &'a [f64],
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

fn check_n(n: usize) -> Result<(), String> {
    if n > MAX_N {
        Err(format!("the demo handles at most {MAX_N} points, got {n}"))
    } else {
        Ok(())
    }
}

fn sample(x: &[f64], y: &[f64]) -> Result<PairedSample, String> {
    check_n(x.len())?;
    PairedSample::from_vecs(x.to_vec(), y.to_vec()).map_err(|e| e.to_string())
}

fn test_config(
    method: &str,
    permutations: usize,
    alpha: f64,
    seed: u64,
) -> Result<IndependenceTestConfig, String> {
    Ok(IndependenceTestConfig {
        method: method.parse().map_err(|e: Error| e.to_string())?,
        permutations,
        alpha,
        rng_seed: seed,
        ..Default::default()
    })
}

pub fn simulate_json(n: usize, noise: &str, slope: f64, seed: u64) -> Result<String, String> {
    check_n(n)?;
    let noise: NoiseKind = noise.parse().map_err(|e: Error| e.to_string())?;
    let spec = GenSpec::new(n, noise, seed).with_slope(slope);
    let s = generate(&spec).map_err(|e| e.to_string())?;
    Ok(to_json(&SimulateOut {
        x: s.x().as_slice(),
        y: s.y().as_slice(),
    }))
}

pub fn detect_json(
    x: &[f64],
    y: &[f64],
    method: &str,
    permutations: usize,
    alpha: f64,
    seed: u64,
) -> Result<String, String> {
    let sample = sample(x, y)?;
    let cfg = test_config(method, permutations, alpha, seed)?;
    let report = gauss_detect(&sample, &cfg).map_err(|e| e.to_string())?;
    let models = ModelPair::from_raw(&sample).map_err(|e| e.to_string())?;
    let (h10, h20) = (report.h10.expect("always run"), report.h20.expect("always run"));
    Ok(to_json(&DetectOut {
        verdict: report.verdict.as_str(),
        h10: (&h10).into(),
        h20: (&h20).into(),
        slope: report.forward_slope,
        x: models.standardized.x().as_slice(),
        y: models.standardized.y().as_slice(),
        residual_y: models.forward.residuals.as_slice(),
        residual_x: models.reverse.residuals.as_slice(),
    }))
}

/// Permutation null of one residual test. With the same seed, its p-value
/// is the one `detect` reports for that hypothesis.
pub fn null_distribution_json(
    x: &[f64],
    y: &[f64],
    hypothesis: &str,
    permutations: usize,
    seed: u64,
) -> Result<String, String> {
    let models = ModelPair::from_raw(&sample(x, y)?).map_err(|e| e.to_string())?;
    let (predictor, residual) = match hypothesis {
        "h10" => (models.standardized.x(), &models.forward.residuals),
        "h20" => (models.standardized.y(), &models.reverse.residuals),
        other => return Err(format!("unknown hypothesis `{other}`, expected h10 or h20")),
    };
    // same floor and seed discipline as the detector
    test_config("perm", permutations, 0.05, seed)?
        .validate()
        .map_err(|e| e.to_string())?;
    let null = permutation_null(predictor, residual, permutations, test_seed(seed, predictor))
        .map_err(|e| e.to_string())?;
    Ok(to_json(&NullOut {
        observed: null.observed,
        p_value: null.p_value(),
        statistics: &null.statistics,
    }))
}

/// `{"x": [...], "y": [...]}` for `y = slope * x + noise`.
#[wasm_bindgen]
pub fn simulate(n: usize, noise: &str, slope: f64, seed: u32) -> Result<String, JsError> {
    simulate_json(n, noise, slope, seed as u64).map_err(|e| JsError::new(&e))
}

/// Verdict, both test results, standardized data and residuals.
#[wasm_bindgen]
pub fn detect(
    x: &[f64],
    y: &[f64],
    method: &str,
    permutations: usize,
    alpha: f64,
    seed: u32,
) -> Result<String, JsError> {
    detect_json(x, y, method, permutations, alpha, seed as u64).map_err(|e| JsError::new(&e))
}

/// Observed statistic, p-value and permutation statistics for `h10` or `h20`.
#[wasm_bindgen]
pub fn null_distribution(
    x: &[f64],
    y: &[f64],
    hypothesis: &str,
    permutations: usize,
    seed: u32,
) -> Result<String, JsError> {
    null_distribution_json(x, y, hypothesis, permutations, seed as u64)
        .map_err(|e| JsError::new(&e))
}
