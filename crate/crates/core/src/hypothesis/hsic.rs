//! Hilbert–Schmidt independence criterion with Gaussian kernels.
//!
//! The biased estimator is `trace(K H L H) / n^2`, where `K` and `L` are the
//! Gram matrices of the two series and `H = I - 11'/n`. Both Gram matrices are
//! stored double-centered, so the statistic for `y` re-indexed by a
//! permutation `p` is `sum_ij Kc[i][j] * Lc[p[i]][p[j]] / n^2`.

use rand::seq::SliceRandom;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Gamma};

use super::{check_alpha, IndependenceMethod, IndependenceTestConfig, TestDecision, TestKind};
use crate::error::{require_len, Error, Result};
use crate::seed::rng_from;
use crate::series::Series;

pub const MIN_PERMUTATION_N: usize = 8;
pub const MIN_GAMMA_N: usize = 20;
pub const MAX_EXHAUSTIVE_N: usize = 9;

/// Permutations evaluated per pass over the kernel matrices.
const BLOCK: usize = 16;

/// Median of the nonzero pairwise absolute differences.
pub fn median_heuristic_bandwidth(s: &Series) -> Result<f64> {
    require_len(s.len(), 3)?;
    let mut sorted = s.as_slice().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let zeros = count_within(&sorted, 0.0);
    let total = sorted.len() * (sorted.len() - 1) / 2;
    let m = total - zeros;
    if m == 0 {
        return Err(Error::DegenerateSeries("series".into()));
    }
    let upper = kth_difference(&sorted, zeros + m / 2);
    Ok(if m % 2 == 1 {
        upper
    } else {
        0.5 * (kth_difference(&sorted, zeros + m / 2 - 1) + upper)
    })
}

/// Pairs `i < j` of a sorted slice with `sorted[j] - sorted[i] <= t`.
fn count_within(sorted: &[f64], t: f64) -> usize {
    let mut i = 0;
    let mut count = 0;
    for (j, &b) in sorted.iter().enumerate() {
        while b - sorted[i] > t {
            i += 1;
        }
        count += j - i;
    }
    count
}

/// The `k`-th smallest (0-based) pairwise difference of a sorted slice.
///
/// Non-negative doubles order like their bit patterns, so a binary search
/// over bits with an O(n) count per probe lands exactly on a realized
/// difference without materializing all n(n-1)/2 of them.
fn kth_difference(sorted: &[f64], k: usize) -> f64 {
    let span = sorted[sorted.len() - 1] - sorted[0];
    let (mut lo, mut hi) = (0u64, span.to_bits());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if count_within(sorted, f64::from_bits(mid)) > k {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    f64::from_bits(lo)
}

fn gaussian_gram(values: &[f64], sigma: f64) -> Vec<f64> {
    const TILE: usize = 64;
    let n = values.len();
    let scale = -0.5 / (sigma * sigma);
    let mut gram = vec![0.0; n * n];
    // tiles above the diagonal, each mirrored while still in cache
    for i0 in (0..n).step_by(TILE) {
        for j0 in (i0..n).step_by(TILE) {
            for i in i0..(i0 + TILE).min(n) {
                for j in j0.max(i)..(j0 + TILE).min(n) {
                    let d = values[i] - values[j];
                    let k = (scale * d * d).exp();
                    gram[i * n + j] = k;
                    gram[j * n + i] = k;
                }
            }
        }
    }
    gram
}

/// Centers a symmetric matrix in place.
fn double_center(gram: &mut [f64], n: usize) {
    let row_means: Vec<f64> = gram
        .chunks_exact(n)
        .map(|row| row.iter().sum::<f64>() / n as f64)
        .collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    for (i, row) in gram.chunks_exact_mut(n).enumerate() {
        for (j, k) in row.iter_mut().enumerate() {
            *k = *k - row_means[i] - row_means[j] + grand;
        }
    }
}

/// Centered Gram matrices for one pair of series.
struct CenteredKernels {
    n: usize,
    kc: Vec<f64>,
    lc: Vec<f64>,
}

impl CenteredKernels {
    fn new(x: &[f64], y: &[f64], sigma_x: f64, sigma_y: f64) -> Self {
        let n = x.len();
        let mut kc = gaussian_gram(x, sigma_x);
        let mut lc = gaussian_gram(y, sigma_y);
        double_center(&mut kc, n);
        double_center(&mut lc, n);
        Self { n, kc, lc }
    }

    fn identity(&self) -> Vec<u32> {
        (0..self.n as u32).collect()
    }

    fn observed(&self) -> f64 {
        self.permuted(&self.lc, &[self.identity()])[0]
    }

    /// `lc` rounded to single precision. Gathering from it halves the memory
    /// traffic of a permutation sweep, which is bound by reading `n^2` values.
    fn compact(&self) -> Vec<f32> {
        self.lc.iter().map(|&v| v as f32).collect()
    }

    /// HSIC for `y` re-indexed by each permutation in `perms`, gathering
    /// from `lsrc` (either `lc` or its compact copy).
    fn permuted<T: Gather>(&self, lsrc: &[T], perms: &[Vec<u32>]) -> Vec<f64> {
        let n = self.n;
        debug_assert!(perms
            .iter()
            .all(|p| p.len() == n && p.iter().all(|&j| (j as usize) < n)));
        let mut acc = vec![0.0; perms.len()];
        for i in 0..n {
            let krow = &self.kc[i * n..(i + 1) * n];
            let kseg = &krow[i + 1..];
            for (total, p) in acc.iter_mut().zip(perms) {
                let pi = p[i] as usize;
                let lrow = &lsrc[pi * n..(pi + 1) * n];
                let off = T::row_dot(kseg, lrow, &p[i + 1..]);
                *total += krow[i] * lrow[pi].widen() + 2.0 * off;
            }
        }
        let nn = (n * n) as f64;
        acc.into_iter().map(|s| (s / nn).max(0.0)).collect()
    }

    fn permuted_all<T: Gather>(&self, lsrc: &[T], perms: &[Vec<u32>]) -> Vec<f64> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            perms
                .par_chunks(BLOCK)
                .flat_map_iter(|block| self.permuted(lsrc, block))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            perms
                .chunks(BLOCK)
                .flat_map(|block| self.permuted(lsrc, block))
                .collect()
        }
    }

    /// Observed statistic and random-permutation null, both evaluated on the
    /// compact path so the comparison in the p-value is like for like.
    fn random_null(&self, permutations: usize, seed: u64) -> (f64, Vec<f64>) {
        let l32 = self.compact();
        let reference = self.permuted(&l32, &[self.identity()])[0];
        let perms = random_permutations(self.n, permutations, seed);
        (reference, self.permuted_all(&l32, &perms))
    }
}

/// Sums behind the gamma approximation, gathered in two streaming passes
/// over the kernel entries so that memory stays linear in `n`.
#[derive(Debug, Clone, Copy)]
struct GammaMoments {
    n: usize,
    observed: f64,
    k_sum: f64,
    l_sum: f64,
    /// `sum_{i != j} (Kc_ij * Lc_ij / 6)^2`
    var_sum: f64,
}

impl GammaMoments {
    fn new(x: &[f64], y: &[f64], sigma_x: f64, sigma_y: f64) -> Self {
        let n = x.len();
        let (cx, cy) = (-0.5 / (sigma_x * sigma_x), -0.5 / (sigma_y * sigma_y));
        let pair = |i: usize, j: usize| {
            let (dx, dy) = (x[i] - x[j], y[i] - y[j]);
            ((cx * dx * dx).exp(), (cy * dy * dy).exp())
        };

        let mut rk = vec![1.0; n];
        let mut rl = vec![1.0; n];
        for i in 0..n {
            for j in i + 1..n {
                let (k, l) = pair(i, j);
                rk[i] += k;
                rk[j] += k;
                rl[i] += l;
                rl[j] += l;
            }
        }
        let nf = n as f64;
        let (k_sum, l_sum) = (rk.iter().sum::<f64>(), rl.iter().sum::<f64>());
        let (gk, gl) = (k_sum / (nf * nf), l_sum / (nf * nf));
        rk.iter_mut().for_each(|v| *v /= nf);
        rl.iter_mut().for_each(|v| *v /= nf);

        let mut trace = 0.0;
        let mut var_sum = 0.0;
        for i in 0..n {
            let mut off = 0.0;
            let mut off_sq = 0.0;
            for j in i + 1..n {
                let (k, l) = pair(i, j);
                let t = (k - rk[i] - rk[j] + gk) * (l - rl[i] - rl[j] + gl);
                off += t;
                off_sq += t * t;
            }
            trace += (1.0 - 2.0 * rk[i] + gk) * (1.0 - 2.0 * rl[i] + gl) + 2.0 * off;
            var_sum += 2.0 * off_sq / 36.0;
        }
        Self {
            n,
            observed: (trace / (nf * nf)).max(0.0),
            k_sum,
            l_sum,
            var_sum,
        }
    }

    /// Gamma approximation to the null of `n * HSIC`: returns the p-value.
    fn p_value(&self) -> Result<f64> {
        let n = self.n as f64;
        let variance = 72.0 * (n - 4.0) * (n - 5.0) / (n * (n - 1.0) * (n - 2.0) * (n - 3.0))
            * self.var_sum
            / (n * (n - 1.0));
        // raw Gaussian Gram diagonals are exactly 1
        let mu_x = (self.k_sum - n) / (n * (n - 1.0));
        let mu_y = (self.l_sum - n) / (n * (n - 1.0));
        let mean = (1.0 + mu_x * mu_y - mu_x - mu_y) / n;
        if !(variance > 0.0) || !(mean > 0.0) {
            return Err(Error::DegenerateSeries("gamma null has zero spread".into()));
        }
        let shape = mean * mean / variance;
        let scale = variance * n / mean;
        let gamma = Gamma::new(shape, 1.0 / scale)
            .map_err(|e| Error::InvalidInput(format!("gamma null: {e}")))?;
        Ok(gamma.sf(n * self.observed))
    }
}

/// Biased HSIC estimate with Gaussian kernels of the given length scales.
pub fn hsic_statistic(x: &Series, y: &Series, sigma_x: f64, sigma_y: f64) -> Result<f64> {
    check_pair(x, y)?;
    if !(sigma_x > 0.0 && sigma_y > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "bandwidths must be positive, got {sigma_x} and {sigma_y}"
        )));
    }
    Ok(CenteredKernels::new(x.as_slice(), y.as_slice(), sigma_x, sigma_y).observed())
}

fn check_pair(x: &Series, y: &Series) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    require_len(x.len(), 3)
}

/// The observed statistic together with its permutation null sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationNull {
    pub observed: f64,
    /// `observed` recomputed on the single-precision path used for
    /// `statistics`; the p-value compares against this.
    pub reference: f64,
    pub statistics: Vec<f64>,
    pub sigma_x: f64,
    pub sigma_y: f64,
}

impl PermutationNull {
    /// Add-one p-value `(1 + #{b : stat_b >= observed}) / (1 + B)`.
    pub fn p_value(&self) -> f64 {
        let exceed = self
            .statistics
            .iter()
            .filter(|&&s| s >= self.reference)
            .count();
        (1 + exceed) as f64 / (1 + self.statistics.len()) as f64
    }
}

/// Element type a permuted row can be gathered from.
trait Gather: Copy + Send + Sync {
    fn widen(self) -> f64;
    /// `sum_k kseg[k] * lrow[pseg[k]]`; every index in `pseg` must be `< lrow.len()`.
    fn row_dot(kseg: &[f64], lrow: &[Self], pseg: &[u32]) -> f64;
}

fn row_dot_scalar<T: Gather>(kseg: &[f64], lrow: &[T], pseg: &[u32]) -> f64 {
    let mut lanes = [0.0f64; 4];
    let mut kc4 = kseg.chunks_exact(4);
    let mut pc4 = pseg.chunks_exact(4);
    for (kk, pp) in (&mut kc4).zip(&mut pc4) {
        for l in 0..4 {
            lanes[l] += kk[l] * lrow[pp[l] as usize].widen();
        }
    }
    let mut tail = 0.0;
    for (k, &j) in kc4.remainder().iter().zip(pc4.remainder()) {
        tail += k * lrow[j as usize].widen();
    }
    tail + (lanes[0] + lanes[1]) + (lanes[2] + lanes[3])
}

#[cfg(target_arch = "x86_64")]
fn has_avx2() -> bool {
    std::arch::is_x86_feature_detected!("avx2") && std::arch::is_x86_feature_detected!("fma")
}

impl Gather for f64 {
    fn widen(self) -> f64 {
        self
    }

    fn row_dot(kseg: &[f64], lrow: &[f64], pseg: &[u32]) -> f64 {
        row_dot_scalar(kseg, lrow, pseg)
    }
}

impl Gather for f32 {
    fn widen(self) -> f64 {
        self as f64
    }

    fn row_dot(kseg: &[f64], lrow: &[f32], pseg: &[u32]) -> f64 {
        assert_eq!(kseg.len(), pseg.len());
        #[cfg(target_arch = "x86_64")]
        if has_avx2() {
            // SAFETY: features checked; indices are a permutation tail of 0..lrow.len().
            return unsafe { simd::row_dot_f32(kseg, lrow, pseg) };
        }
        row_dot_scalar(kseg, lrow, pseg)
    }
}

#[cfg(target_arch = "x86_64")]
mod simd {
    use std::arch::x86_64::*;

    #[target_feature(enable = "avx2,fma")]
    pub(super) unsafe fn row_dot_f32(kseg: &[f64], lrow: &[f32], pseg: &[u32]) -> f64 {
        let len = kseg.len();
        let base = lrow.as_ptr();
        let (kp, ip) = (kseg.as_ptr(), pseg.as_ptr());
        let mut acc0 = _mm256_setzero_pd();
        let mut acc1 = _mm256_setzero_pd();
        let mut k = 0;
        while k + 8 <= len {
            let i0 = _mm_loadu_si128(ip.add(k) as *const __m128i);
            let i1 = _mm_loadu_si128(ip.add(k + 4) as *const __m128i);
            let l0 = _mm256_cvtps_pd(_mm_i32gather_ps::<4>(base, i0));
            let l1 = _mm256_cvtps_pd(_mm_i32gather_ps::<4>(base, i1));
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(kp.add(k)), l0, acc0);
            acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(kp.add(k + 4)), l1, acc1);
            k += 8;
        }
        let mut lanes = [0.0f64; 4];
        _mm256_storeu_pd(lanes.as_mut_ptr(), _mm256_add_pd(acc0, acc1));
        let mut tail = 0.0;
        while k < len {
            tail += kseg[k] * *lrow.get_unchecked(pseg[k] as usize) as f64;
            k += 1;
        }
        tail + (lanes[0] + lanes[1]) + (lanes[2] + lanes[3])
    }
}

fn random_permutations(n: usize, count: usize, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = rng_from(seed);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    (0..count)
        .map(|_| {
            perm.shuffle(&mut rng);
            perm.clone()
        })
        .collect()
}

/// Every permutation of `0..n`, identity first (Heap's algorithm).
fn all_permutations(n: usize) -> Vec<Vec<u32>> {
    let mut a: Vec<u32> = (0..n as u32).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Draws `permutations` random re-indexings of `y` from `seed` and evaluates
/// HSIC on each, with bandwidths fixed from the original series.
pub fn permutation_null(
    x: &Series,
    y: &Series,
    permutations: usize,
    seed: u64,
) -> Result<PermutationNull> {
    check_pair(x, y)?;
    let sigma_x = median_heuristic_bandwidth(x)?;
    let sigma_y = median_heuristic_bandwidth(y)?;
    let kernels = CenteredKernels::new(x.as_slice(), y.as_slice(), sigma_x, sigma_y);
    let (reference, statistics) = kernels.random_null(permutations, seed);
    Ok(PermutationNull {
        observed: kernels.observed(),
        reference,
        statistics,
        sigma_x,
        sigma_y,
    })
}

/// Tests `H0: x and y are independent`.
pub fn independence_test(
    x: &Series,
    y: &Series,
    cfg: &IndependenceTestConfig,
) -> Result<TestDecision> {
    check_alpha(cfg.alpha)?;
    cfg.validate()?;
    check_pair(x, y)?;
    let n = x.len();
    match cfg.method {
        IndependenceMethod::PermutationHsic => require_len(n, MIN_PERMUTATION_N)?,
        IndependenceMethod::GammaHsic => require_len(n, MIN_GAMMA_N)?,
        IndependenceMethod::ExhaustiveHsic => {
            if n > MAX_EXHAUSTIVE_N {
                return Err(Error::InvalidConfig(format!(
                    "exhaustive enumeration limited to n <= {MAX_EXHAUSTIVE_N}, got {n}"
                )));
            }
        }
    }

    let sigma_x = median_heuristic_bandwidth(x)?;
    let sigma_y = median_heuristic_bandwidth(y)?;
    if cfg.method == IndependenceMethod::GammaHsic {
        let moments = GammaMoments::new(x.as_slice(), y.as_slice(), sigma_x, sigma_y);
        return Ok(TestDecision::new(
            TestKind::Independence,
            moments.observed,
            moments.p_value()?,
            cfg.alpha,
        ));
    }
    let kernels = CenteredKernels::new(x.as_slice(), y.as_slice(), sigma_x, sigma_y);
    let observed = kernels.observed();

    let p_value = match cfg.method {
        IndependenceMethod::PermutationHsic => {
            let (reference, statistics) = kernels.random_null(cfg.permutations, cfg.rng_seed);
            PermutationNull {
                observed,
                reference,
                statistics,
                sigma_x,
                sigma_y,
            }
            .p_value()
        }
        IndependenceMethod::ExhaustiveHsic => {
            let perms = all_permutations(n);
            let stats = kernels.permuted_all(&kernels.lc, &perms);
            let exceed = stats.iter().filter(|&&s| s >= observed).count();
            exceed as f64 / stats.len() as f64
        }
        IndependenceMethod::GammaHsic => unreachable!(),
    };

    Ok(TestDecision::new(
        TestKind::Independence,
        observed,
        p_value,
        cfg.alpha,
    ))
}
