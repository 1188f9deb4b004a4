//! Intercept-free least-squares fits of the forward and reverse models.
//!
//! Forward: `y = a·x + e_y`. Reverse: `x = b·y + e_x`. Both columns must be
//! standardized first, which puts the intercept at zero by construction.

use serde::Serialize;

use crate::error::{require_len, Error, Result};
use crate::series::{is_standardized, PairedSample, Series, STANDARDIZED_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    /// Regress `y` on `x`.
    Forward,
    /// Regress `x` on `y`.
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionFit {
    pub direction: Direction,
    /// `a` for the forward model, `b` for the reverse model.
    pub slope: f64,
    /// `e_y` for the forward model, `e_x` for the reverse model.
    pub residuals: Series,
}

/// Fits one direction of the bivariate linear model.
///
/// Fails with `NotStandardized` when either column is off by more than
/// [`STANDARDIZED_TOLERANCE`] in mean or standard deviation.
pub fn fit(sample: &PairedSample, direction: Direction) -> Result<RegressionFit> {
    require_len(sample.len(), 3)?;
    if sample.x().len() != sample.y().len() {
        return Err(Error::LengthMismatch {
            left: sample.x().len(),
            right: sample.y().len(),
        });
    }
    for (name, s) in [("x", sample.x()), ("y", sample.y())] {
        if !is_standardized(s, STANDARDIZED_TOLERANCE) {
            return Err(Error::NotStandardized(name.into()));
        }
    }

    let (regressor, response) = match direction {
        Direction::Forward => (sample.x().as_slice(), sample.y().as_slice()),
        Direction::Reverse => (sample.y().as_slice(), sample.x().as_slice()),
    };
    let sxy: f64 = regressor.iter().zip(response).map(|(u, v)| u * v).sum();
    let sxx: f64 = regressor.iter().map(|u| u * u).sum();
    let slope = sxy / sxx;
    let residuals = response
        .iter()
        .zip(regressor)
        .map(|(v, u)| v - slope * u)
        .collect();

    Ok(RegressionFit {
        direction,
        slope,
        residuals: Series::from_vec_unchecked(residuals),
    })
}

/// Both fits for one standardized sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPair {
    pub standardized: PairedSample,
    pub forward: RegressionFit,
    pub reverse: RegressionFit,
}

impl ModelPair {
    /// Standardizes `sample` and fits both directions.
    pub fn from_raw(sample: &PairedSample) -> Result<Self> {
        let standardized = sample.standardized()?;
        let forward = fit(&standardized, Direction::Forward)?;
        let reverse = fit(&standardized, Direction::Reverse)?;
        Ok(Self {
            standardized,
            forward,
            reverse,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::standardize;
    use approx::assert_abs_diff_eq;

    fn std_series(v: &[f64]) -> Series {
        standardize(&Series::new(v.to_vec()).unwrap()).unwrap().values
    }

    #[test]
    fn perfect_correlation() {
        let x = std_series(&[0.2, 1.5, -0.7, 3.1, 0.0, -2.2]);
        let p = PairedSample::new(x.clone(), x.clone()).unwrap();
        let f = fit(&p, Direction::Forward).unwrap();
        assert_abs_diff_eq!(f.slope, 1.0, epsilon = 1e-12);
        assert!(f.residuals.as_slice().iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn perfect_anticorrelation() {
        let x = std_series(&[0.2, 1.5, -0.7, 3.1, 0.0, -2.2]);
        let neg = x.map(|v| -v);
        let p = PairedSample::new(x, neg).unwrap();
        let f = fit(&p, Direction::Reverse).unwrap();
        assert_abs_diff_eq!(f.slope, -1.0, epsilon = 1e-12);
        assert!(f.residuals.as_slice().iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn raw_input_is_rejected() {
        let p = PairedSample::from_vecs(vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 1.0, 4.0, 3.0]).unwrap();
        assert_eq!(
            fit(&p, Direction::Forward),
            Err(Error::NotStandardized("x".into()))
        );
    }

    #[test]
    fn residuals_orthogonal_and_centered() {
        let x = std_series(&[0.3, -1.2, 2.5, 0.0, 1.1, 0.7, -0.4]);
        let y = std_series(&[1.0, -0.5, 2.0, 0.3, 0.1, 1.9, -1.4]);
        let p = PairedSample::new(x.clone(), y).unwrap();
        let f = fit(&p, Direction::Forward).unwrap();
        let n = x.len() as f64;
        let dot: f64 = x
            .as_slice()
            .iter()
            .zip(f.residuals.as_slice())
            .map(|(a, b)| a * b)
            .sum();
        assert!(dot.abs() / n <= 1e-10);
        assert!(f.residuals.mean().abs() <= 1e-10);
    }
}
