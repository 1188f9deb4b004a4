//! Gaussianity tests for a single series.

use statrs::function::erf::erfc;

use super::{check_alpha, TestDecision, TestKind};
use crate::error::{require_len, Error, Result};
use crate::series::Series;

/// The chi-square null of Jarque–Bera is asymptotic; below this it is
/// badly miscalibrated.
pub const MIN_JARQUE_BERA_N: usize = 20;
pub const MIN_ANDERSON_DARLING_N: usize = 8;

/// Sample skewness and kurtosis from biased (n-denominator) central moments.
fn shape_moments(v: &[f64]) -> Result<(f64, f64)> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in v {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if !(m2 > 0.0) {
        return Err(Error::DegenerateSeries("series".into()));
    }
    Ok((m3 / m2.powf(1.5), m4 / (m2 * m2)))
}

/// `(n/6)(S^2 + (K - 3)^2 / 4)`.
pub fn jarque_bera_statistic(s: &Series) -> Result<f64> {
    require_len(s.len(), 3)?;
    let (skew, kurt) = shape_moments(s.as_slice())?;
    let n = s.len() as f64;
    Ok(n / 6.0 * (skew * skew + (kurt - 3.0).powi(2) / 4.0))
}

/// Jarque–Bera test of the composite normal null.
pub fn jarque_bera_test(s: &Series, alpha: f64) -> Result<TestDecision> {
    check_alpha(alpha)?;
    require_len(s.len(), MIN_JARQUE_BERA_N)?;
    let statistic = jarque_bera_statistic(s)?;
    // chi-square(2) survival function
    let p_value = (-statistic / 2.0).exp();
    Ok(TestDecision::new(
        TestKind::Gaussianity,
        statistic,
        p_value,
        alpha,
    ))
}

fn ln_normal_cdf(z: f64) -> f64 {
    (0.5 * erfc(-z / std::f64::consts::SQRT_2))
        .max(f64::MIN_POSITIVE)
        .ln()
}

/// Unadjusted `A^2` against a normal with estimated mean and variance.
pub fn anderson_darling_statistic(s: &Series) -> Result<f64> {
    require_len(s.len(), 3)?;
    let n = s.len();
    let mean = s.mean();
    let sd = s.std_dev();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSeries("series".into()));
    }
    let mut z: Vec<f64> = s.as_slice().iter().map(|v| (v - mean) / sd).collect();
    z.sort_unstable_by(f64::total_cmp);

    let sum: f64 = (0..n)
        .map(|i| {
            let weight = (2 * i + 1) as f64;
            // ln(1 - Phi(z)) == ln Phi(-z)
            weight * (ln_normal_cdf(z[i]) + ln_normal_cdf(-z[n - 1 - i]))
        })
        .sum();
    Ok(-(n as f64) - sum / n as f64)
}

/// Upper-tail probability of the small-sample adjusted statistic, case 3
/// (both parameters estimated).
fn anderson_darling_p_value(adjusted: f64) -> f64 {
    let a = adjusted;
    let p = if a < 0.2 {
        1.0 - (-13.436 + 101.14 * a - 223.73 * a * a).exp()
    } else if a < 0.34 {
        1.0 - (-8.318 + 42.796 * a - 59.938 * a * a).exp()
    } else if a < 0.6 {
        (0.9177 - 4.279 * a - 1.38 * a * a).exp()
    } else if a < 10.0 {
        (1.2937 - 5.709 * a + 0.0186 * a * a).exp()
    } else {
        3.7e-24
    };
    p.clamp(0.0, 1.0)
}

/// Anderson–Darling test of the composite normal null.
///
/// The reported statistic is the adjusted `A*^2 = A^2 (1 + 0.75/n + 2.25/n^2)`.
pub fn anderson_darling_test(s: &Series, alpha: f64) -> Result<TestDecision> {
    check_alpha(alpha)?;
    require_len(s.len(), MIN_ANDERSON_DARLING_N)?;
    let n = s.len() as f64;
    let adjusted = anderson_darling_statistic(s)? * (1.0 + 0.75 / n + 2.25 / (n * n));
    Ok(TestDecision::new(
        TestKind::Gaussianity,
        adjusted,
        anderson_darling_p_value(adjusted),
        alpha,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::{Exp1, StandardNormal};
    use statrs::distribution::{ContinuousCDF, Normal};

    use crate::seed::rng_from;

    fn series(v: Vec<f64>) -> Series {
        Series::new(v).unwrap()
    }

    #[test]
    fn jarque_bera_symmetric_four_points() {
        let s = series(vec![-3.0, -1.0, 1.0, 3.0]);
        // m2 = 5, m4 = 41, K = 41/25
        let k: f64 = 41.0 / 25.0;
        let expected = 4.0 / 6.0 * (k - 3.0).powi(2) / 4.0;
        assert_abs_diff_eq!(jarque_bera_statistic(&s).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn jarque_bera_floor_and_degenerate() {
        let short = series((0..19).map(f64::from).collect());
        assert!(matches!(
            jarque_bera_test(&short, 0.05),
            Err(Error::InsufficientSample { needed: 20, .. })
        ));
        let flat = series(vec![1.5; 30]);
        assert!(matches!(
            jarque_bera_test(&flat, 0.05),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn jarque_bera_p_value_is_chi2_survival() {
        let mut rng = rng_from(3);
        let s = series((0..50).map(|_| rng.sample(StandardNormal)).collect());
        let d = jarque_bera_test(&s, 0.05).unwrap();
        let chi2 = statrs::distribution::ChiSquared::new(2.0).unwrap();
        assert_abs_diff_eq!(d.p_value, chi2.sf(d.statistic), epsilon = 1e-12);
    }

    #[test]
    fn anderson_darling_quantile_sequence_looks_normal() {
        let n = 50;
        let normal = Normal::new(0.0, 1.0).unwrap();
        let s = series(
            (1..=n)
                .map(|i| normal.inverse_cdf((i as f64 - 0.5) / n as f64))
                .collect(),
        );
        let d = anderson_darling_test(&s, 0.05).unwrap();
        assert!(d.p_value > 0.5, "{d:?}");
    }

    #[test]
    fn anderson_darling_rejects_exponential() {
        let mut rng = rng_from(400);
        let s = series((0..400).map(|_| rng.sample(Exp1)).collect());
        let d = anderson_darling_test(&s, 0.05).unwrap();
        assert!(d.reject, "{d:?}");
    }

    #[test]
    fn anderson_darling_statistic_against_direct_formula() {
        // oracle: textbook form with explicit 1 - Phi, statrs normal CDF
        let mut rng = rng_from(8);
        let v: Vec<f64> = (0..25).map(|_| rng.sample(StandardNormal)).collect();
        let s = series(v.clone());
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
        let mut sorted = v.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let phi = Normal::new(0.0, 1.0).unwrap();
        let mut acc = 0.0;
        for i in 0..n {
            let fi = phi.cdf((sorted[i] - mean) / sd);
            let fr = phi.cdf((sorted[n - 1 - i] - mean) / sd);
            acc += (2 * i + 1) as f64 * (fi.ln() + (1.0 - fr).ln());
        }
        let expected = -(n as f64) - acc / n as f64;
        assert_abs_diff_eq!(anderson_darling_statistic(&s).unwrap(), expected, epsilon = 1e-9);
    }

    #[test]
    fn anderson_darling_p_value_piecewise_is_continuous_enough() {
        for edge in [0.2, 0.34, 0.6] {
            let lo = anderson_darling_p_value(edge - 1e-9);
            let hi = anderson_darling_p_value(edge + 1e-9);
            assert!((lo - hi).abs() < 0.01, "jump at {edge}: {lo} vs {hi}");
        }
    }
}
