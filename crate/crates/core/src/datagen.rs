//! Seeded synthetic data: `x ~ N(0, 1)`, `y = slope·x + e` with `e` drawn
//! from one of four zero-mean noise families.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};
use serde::Serialize;

use crate::error::{require_len, Error, Result};
use crate::seed::{derive_seed, rng_from};
use crate::series::{PairedSample, Series};

pub const MIN_GENERATE_N: usize = 20;

const X_STREAM: u64 = 0x5EED_0000_0000_0001;
const NOISE_STREAM: u64 = 0x5EED_0000_0000_0002;

/// Noise family and its parameter. Every family is centered before use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum NoiseKind {
    Gaussian { sd: f64 },
    /// Shifted by `-1/rate`.
    Exponential { rate: f64 },
    Laplace { scale: f64 },
    /// Shifted by `-rate`.
    Poisson { rate: f64 },
}

impl NoiseKind {
    pub const GAUSSIAN: NoiseKind = NoiseKind::Gaussian { sd: 1.0 };
    pub const EXPONENTIAL: NoiseKind = NoiseKind::Exponential { rate: 1.0 };
    pub const LAPLACE: NoiseKind = NoiseKind::Laplace { scale: 1.0 };
    pub const POISSON: NoiseKind = NoiseKind::Poisson { rate: 1.0 };

    /// The four default families, in a fixed order.
    pub const ALL: [NoiseKind; 4] = [
        NoiseKind::GAUSSIAN,
        NoiseKind::EXPONENTIAL,
        NoiseKind::LAPLACE,
        NoiseKind::POISSON,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Gaussian { .. } => "gaussian",
            NoiseKind::Exponential { .. } => "exponential",
            NoiseKind::Laplace { .. } => "laplace",
            NoiseKind::Poisson { .. } => "poisson",
        }
    }

    fn parameter(&self) -> f64 {
        match *self {
            NoiseKind::Gaussian { sd } => sd,
            NoiseKind::Exponential { rate } => rate,
            NoiseKind::Laplace { scale } => scale,
            NoiseKind::Poisson { rate } => rate,
        }
    }

    /// Stable identifier used when deriving per-cell seeds.
    pub fn tag(&self) -> u64 {
        let family = match self {
            NoiseKind::Gaussian { .. } => 1,
            NoiseKind::Exponential { .. } => 2,
            NoiseKind::Laplace { .. } => 3,
            NoiseKind::Poisson { .. } => 4,
        };
        derive_seed(family, &[self.parameter().to_bits()])
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.parameter();
        if p > 0.0 && p.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "{} noise parameter must be positive, got {p}",
                self.name()
            )))
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    /// Accepts a bare family name (unit parameter) or `family:parameter`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((name, p)) => {
                let p = p.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidConfig(format!("bad noise parameter in `{s}`"))
                })?;
                (name, p)
            }
            None => (s, 1.0),
        };
        let kind = match name.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => NoiseKind::Gaussian { sd: param },
            "exponential" | "exp" => NoiseKind::Exponential { rate: param },
            "laplace" => NoiseKind::Laplace { scale: param },
            "poisson" => NoiseKind::Poisson { rate: param },
            other => {
                return Err(Error::InvalidConfig(format!("unknown noise kind `{other}`")))
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// Draws `n` centered noise values.
pub fn sample_noise<R: Rng + ?Sized>(kind: NoiseKind, n: usize, rng: &mut R) -> Result<Series> {
    kind.validate()?;
    let bad = |e: &dyn fmt::Display| Error::InvalidConfig(format!("{kind} noise: {e}"));
    let values: Vec<f64> = match kind {
        NoiseKind::Gaussian { sd } => {
            let d = Normal::new(0.0, sd).map_err(|e| bad(&e))?;
            (0..n).map(|_| d.sample(rng)).collect()
        }
        NoiseKind::Exponential { rate } => {
            let d = Exp::new(rate).map_err(|e| bad(&e))?;
            (0..n).map(|_| d.sample(rng) - 1.0 / rate).collect()
        }
        NoiseKind::Laplace { scale } => (0..n)
            .map(|_| {
                // inverse CDF on u in (-1/2, 1/2)
                let u: f64 = rng.random::<f64>() - 0.5;
                -scale * u.signum() * (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln()
            })
            .collect(),
        NoiseKind::Poisson { rate } => {
            let d = Poisson::new(rate).map_err(|e| bad(&e))?;
            (0..n).map(|_| d.sample(rng) - rate).collect()
        }
    };
    Series::new(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenSpec {
    pub n: usize,
    pub slope: f64,
    pub noise: NoiseKind,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n: usize, noise: NoiseKind, seed: u64) -> Self {
        Self {
            n,
            slope: 2.0,
            noise,
            seed,
        }
    }

    pub fn with_slope(mut self, slope: f64) -> Self {
        self.slope = slope;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require_len(self.n, MIN_GENERATE_N)?;
        if !self.slope.is_finite() {
            return Err(Error::InvalidConfig("slope must be finite".into()));
        }
        self.noise.validate()
    }
}

/// `x` and the noise come from separate substreams of `spec.seed`, so the
/// `x` column does not depend on the noise family.
pub fn generate(spec: &GenSpec) -> Result<PairedSample> {
    spec.validate()?;
    let mut x_rng = rng_from(derive_seed(spec.seed, &[X_STREAM]));
    let mut e_rng = rng_from(derive_seed(spec.seed, &[NOISE_STREAM]));
    let x = sample_noise(NoiseKind::GAUSSIAN, spec.n, &mut x_rng)?;
    let noise = sample_noise(spec.noise, spec.n, &mut e_rng)?;
    let y = x
        .as_slice()
        .iter()
        .zip(noise.as_slice())
        .map(|(xi, ei)| spec.slope * xi + ei)
        .collect();
    PairedSample::new(x, Series::new(y)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn moments(v: &[f64]) -> (f64, f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1.0);
        let m2 = v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / n;
        let m3 = v.iter().map(|a| (a - m).powi(3)).sum::<f64>() / n;
        (m, var, m3 / m2.powf(1.5))
    }

    fn draw(kind: NoiseKind, seed: u64) -> Vec<f64> {
        let mut rng = rng_from(seed);
        sample_noise(kind, 100_000, &mut rng).unwrap().into_vec()
    }

    #[test]
    fn gaussian_moments() {
        let (m, var, _) = moments(&draw(NoiseKind::GAUSSIAN, 1));
        assert_abs_diff_eq!(m, 0.0, epsilon = 0.02);
        assert_abs_diff_eq!(var, 1.0, epsilon = 0.05);
    }

    #[test]
    fn exponential_is_centered_and_skewed() {
        let (m, _, skew) = moments(&draw(NoiseKind::EXPONENTIAL, 2));
        assert_abs_diff_eq!(m, 0.0, epsilon = 0.02);
        assert_abs_diff_eq!(skew, 2.0, epsilon = 0.1);
    }

    #[test]
    fn poisson_variance() {
        let (m, var, _) = moments(&draw(NoiseKind::POISSON, 3));
        assert_abs_diff_eq!(m, 0.0, epsilon = 0.02);
        assert_abs_diff_eq!(var, 1.0, epsilon = 0.05);
    }

    #[test]
    fn laplace_is_centered_with_variance_two() {
        let (m, var, _) = moments(&draw(NoiseKind::LAPLACE, 4));
        // Laplace(0, 1): mean 0, variance 2; 5 sigma bounds at n = 1e5
        assert_abs_diff_eq!(m, 0.0, epsilon = 0.025);
        assert_abs_diff_eq!(var, 2.0, epsilon = 0.1);
    }

    #[test]
    fn correlation_matches_slope() {
        let p = generate(&GenSpec::new(10_000, NoiseKind::GAUSSIAN, 5)).unwrap();
        let r = corr(p.x().as_slice(), p.y().as_slice());
        assert_abs_diff_eq!(r, 2.0 / 5f64.sqrt(), epsilon = 0.02);

        let flat = generate(&GenSpec::new(10_000, NoiseKind::LAPLACE, 6).with_slope(0.0)).unwrap();
        assert_abs_diff_eq!(corr(flat.x().as_slice(), flat.y().as_slice()), 0.0, epsilon = 0.05);
    }

    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let sab: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let saa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let sbb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        sab / (saa * sbb).sqrt()
    }

    #[test]
    fn determinism_and_shared_x_stream() {
        let a = generate(&GenSpec::new(50, NoiseKind::LAPLACE, 9)).unwrap();
        let b = generate(&GenSpec::new(50, NoiseKind::LAPLACE, 9)).unwrap();
        assert_eq!(a, b);
        let c = generate(&GenSpec::new(50, NoiseKind::POISSON, 9)).unwrap();
        assert_eq!(a.x(), c.x());
        assert_ne!(a.y(), c.y());
    }

    #[test]
    fn parse_names() {
        assert_eq!("laplace".parse::<NoiseKind>().unwrap(), NoiseKind::LAPLACE);
        assert_eq!(
            "poisson:3".parse::<NoiseKind>().unwrap(),
            NoiseKind::Poisson { rate: 3.0 }
        );
        assert!("cauchy".parse::<NoiseKind>().is_err());
        assert!("exponential:-1".parse::<NoiseKind>().is_err());
    }

    #[test]
    fn floor() {
        assert!(matches!(
            generate(&GenSpec::new(5, NoiseKind::GAUSSIAN, 1)),
            Err(Error::InsufficientSample { given: 5, needed: 20 })
        ));
    }
}
