//! Observation containers and standardization.

use serde::Serialize;

use crate::error::{require_len, Error, Result};

/// Tolerance used when checking that a series is already standardized.
pub const STANDARDIZED_TOLERANCE: f64 = 1e-8;

/// An ordered vector of finite observations.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Series(Vec<f64>);

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value {} at index {i}",
                values[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn mean(&self) -> f64 {
        mean(&self.0)
    }

    /// Sample standard deviation with the `n - 1` denominator.
    pub fn std_dev(&self) -> f64 {
        sample_std(&self.0)
    }

    /// Applies `f` elementwise. Callers guarantee `f` keeps values finite.
    pub(crate) fn map(&self, f: impl Fn(f64) -> f64) -> Series {
        Series(self.0.iter().map(|&v| f(v)).collect())
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Series {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Series(values)
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Series::new(values)
    }
}

impl AsRef<[f64]> for Series {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn sample_std(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() as f64 - 1.0)).sqrt()
}

/// Positionally paired observations of two variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedSample {
    x: Series,
    y: Series,
}

impl PairedSample {
    pub fn new(x: Series, y: Series) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        Ok(Self { x, y })
    }

    pub fn from_vecs(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::new(Series::new(x)?, Series::new(y)?)
    }

    pub fn x(&self) -> &Series {
        &self.x
    }

    pub fn y(&self) -> &Series {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// The same observations with the roles of `x` and `y` exchanged.
    pub fn swapped(&self) -> PairedSample {
        PairedSample {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }

    /// Standardizes both columns, naming the offending one on failure.
    pub fn standardized(&self) -> Result<PairedSample> {
        let x = standardize(&self.x).map_err(|e| rename(e, "x"))?;
        let y = standardize(&self.y).map_err(|e| rename(e, "y"))?;
        Ok(PairedSample {
            x: x.values,
            y: y.values,
        })
    }

    pub fn into_parts(self) -> (Series, Series) {
        (self.x, self.y)
    }
}

fn rename(err: Error, name: &str) -> Error {
    match err {
        Error::DegenerateSeries(_) => Error::DegenerateSeries(name.to_string()),
        Error::NotStandardized(_) => Error::NotStandardized(name.to_string()),
        other => other,
    }
}

/// A zero-mean, unit-variance series that remembers how to undo itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StandardizedSeries {
    pub values: Series,
    pub original_mean: f64,
    pub original_std: f64,
}

impl StandardizedSeries {
    /// Maps the standardized values back to the original scale.
    pub fn inverse(&self) -> Series {
        self.values
            .map(|v| v * self.original_std + self.original_mean)
    }
}

/// Centers `s` and scales it to unit sample standard deviation.
pub fn standardize(s: &Series) -> Result<StandardizedSeries> {
    require_len(s.len(), 3)?;
    let original_mean = s.mean();
    let original_std = s.std_dev();
    if !(original_std > 0.0) || !original_std.is_finite() {
        return Err(Error::DegenerateSeries("series".into()));
    }
    let values = s.map(|v| (v - original_mean) / original_std);
    Ok(StandardizedSeries {
        values,
        original_mean,
        original_std,
    })
}

/// Whether `s` has mean 0 and sample std 1 within `tol`.
pub fn is_standardized(s: &Series, tol: f64) -> bool {
    s.len() >= 2 && s.mean().abs() <= tol && (s.std_dev() - 1.0).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn three_point_case() {
        let s = Series::new(vec![1.0, 2.0, 3.0]).unwrap();
        let z = standardize(&s).unwrap();
        assert_eq!(z.values.as_slice(), &[-1.0, 0.0, 1.0]);
        assert_eq!(z.original_mean, 2.0);
        assert_eq!(z.original_std, 1.0);
    }

    #[test]
    fn constant_input_is_degenerate() {
        let s = Series::new(vec![5.0, 5.0, 5.0]).unwrap();
        assert!(matches!(standardize(&s), Err(Error::DegenerateSeries(_))));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            Series::new(vec![1.0, f64::NAN, 3.0]),
            Err(Error::InvalidInput(_))
        ));
        assert!(Series::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn too_short() {
        let s = Series::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            standardize(&s),
            Err(Error::InsufficientSample { given: 2, needed: 3 })
        ));
    }

    #[test]
    fn five_point_case_against_direct_sums() {
        let raw = [0.3, -1.2, 2.5, 0.0, 1.1];
        let z = standardize(&Series::new(raw.to_vec()).unwrap()).unwrap();
        // oracle: plain summation
        let v = z.values.as_slice();
        let m: f64 = v.iter().sum::<f64>() / 5.0;
        let var: f64 = v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / 4.0;
        assert_abs_diff_eq!(m, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(var.sqrt(), 1.0, epsilon = 1e-12);
        let back = z.inverse();
        for (a, b) in back.as_slice().iter().zip(raw) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn paired_standardize_names_column() {
        let p = PairedSample::from_vecs(vec![1.0, 2.0, 3.0], vec![4.0, 4.0, 4.0]).unwrap();
        assert_eq!(p.standardized(), Err(Error::DegenerateSeries("y".into())));
    }

    #[test]
    fn paired_length_mismatch() {
        let err = PairedSample::from_vecs(vec![1.0, 2.0], vec![1.0]).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { left: 2, right: 1 });
    }
}
