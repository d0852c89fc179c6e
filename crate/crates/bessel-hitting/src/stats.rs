//! Statistical machinery for validation: Kolmogorov-Smirnov one- and
//! two-sample tests, mean confidence intervals, histograms.

use crate::error::{Error, Result};

/// Asymptotic 1% KS coefficient c(0.01) = sqrt(-ln(0.005)/2). All validation
/// sample sizes in this crate are >= 1e3, where the asymptotic regime holds.
pub const KS_COEFF_1PCT: f64 = 1.6276;

/// Outcome of a KS test at the fixed 1% level.
#[derive(Clone, Debug)]
pub struct KsResult {
    /// Sup-distance between the compared distribution functions.
    pub statistic: f64,
    /// First (or only) sample size.
    pub n: usize,
    /// Second sample size for the two-sample test.
    pub m: Option<usize>,
    /// 1% critical value: c(0.01)/sqrt(n) or c(0.01)*sqrt((n+m)/(n m)).
    pub critical_1pct: f64,
    /// statistic < critical_1pct
    pub pass: bool,
}

/// One-sample KS statistic of `samples` against a (monotone) CDF, using both
/// one-sided gaps at every order statistic.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let nf = n as f64;
    let mut d = 0.0_f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    let critical_1pct = KS_COEFF_1PCT / nf.sqrt();
    Ok(KsResult { statistic: d, n, m: None, critical_1pct, pass: d < critical_1pct })
}

/// Two-sample KS statistic between `xs` and `ys`.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<KsResult> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut xs = xs.to_vec();
    let mut ys = ys.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());
    let (nf, mf) = (n as f64, m as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0_f64;
    while i < n && j < m {
        // advance both empirical CDFs through the smallest pending value
        let t = xs[i].min(ys[j]);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / nf - j as f64 / mf).abs());
    }
    let critical_1pct = KS_COEFF_1PCT * ((nf + mf) / (nf * mf)).sqrt();
    Ok(KsResult { statistic: d, n, m: Some(m), critical_1pct, pass: d < critical_1pct })
}

/// Sample mean with a `z * s / sqrt(n)` confidence half-width. Needs n >= 2.
pub fn mean_ci(samples: &[f64], z: f64) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::EmptySample);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, z * (var / n).sqrt()))
}

/// Uniform-bin histogram over `range = (lo, hi)`; samples outside the range
/// are dropped, the right edge lands in the last bin. A degenerate range
/// (hi <= lo) collects everything equal to `lo` into the single first bin.
pub fn histogram(samples: &[f64], bins: usize, range: (f64, f64)) -> Vec<u64> {
    assert!(bins >= 1, "histogram needs at least one bin");
    let (lo, hi) = range;
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in samples {
        if x < lo || x > hi || x.is_nan() {
            continue;
        }
        let idx = if width > 0.0 { (((x - lo) / width) as usize).min(bins - 1) } else { 0 };
        counts[idx] += 1;
    }
    counts
}
