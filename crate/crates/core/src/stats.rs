//! Log-normal fitting of Josephson-energy samples and propagation to the
//! transmon transition frequency.

use serde::Serialize;
use statrs::function::erf::erfc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("sample {index} is not positive ({value})")]
    NonPositive { index: usize, value: f64 },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("transmon estimate needs E_J > E_C > 0 (E_J = {e_j} GHz, E_C = {e_c} GHz)")]
    OutsideTransmonRegime { e_j: f64, e_c: f64 },
    #[error("histogram needs at least two bins, got {0}")]
    TooFewBins(usize),
    #[error("empty sample list")]
    Empty,
}

pub const MIN_FIT_SAMPLES: usize = 10;

/// Maximum-likelihood log-normal fit with derived moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogNormalFit {
    /// Mean of ln(E_J / 1 GHz).
    pub mu_j: f64,
    /// Population standard deviation of ln(E_J / 1 GHz).
    pub sigma_j: f64,
    /// Mean of the fitted distribution (GHz).
    pub mean_ej: f64,
    /// Standard deviation of the fitted distribution (GHz).
    pub std_ej: f64,
    pub n: usize,
    /// Kolmogorov–Smirnov distance of the log-samples from N(mu_j, sigma_j^2).
    pub ks_statistic: f64,
    /// Raw sample mean (GHz).
    pub sample_mean: f64,
    /// Raw population standard deviation (GHz).
    pub sample_std: f64,
    /// Raw sample skewness.
    pub sample_skewness: f64,
}

/// `(mean, variance)` of a log-normal distribution.
pub fn lognormal_moments(mu_j: f64, sigma_j: f64) -> (f64, f64) {
    let s2 = sigma_j * sigma_j;
    let mean = (mu_j + s2 / 2.0).exp();
    let variance = (s2.exp() - 1.0) * (2.0 * mu_j + s2).exp();
    (mean, variance)
}

pub fn lognormal_pdf(x: f64, mu_j: f64, sigma_j: f64) -> f64 {
    if x <= 0.0 || sigma_j <= 0.0 {
        return 0.0;
    }
    let z = (x.ln() - mu_j) / sigma_j;
    (-0.5 * z * z).exp() / (x * sigma_j * (2.0 * std::f64::consts::PI).sqrt())
}

pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Population mean, standard deviation and skewness.
pub fn describe(samples: &[f64]) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let m2 = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = samples.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    let skew = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
    (mean, m2.sqrt(), skew)
}

/// One-sample KS distance of `values` from N(mu, sigma^2).
pub fn ks_statistic_normal(values: &[f64], mu: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return if values.iter().all(|&v| v == mu) { 0.0 } else { 1.0 };
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = standard_normal_cdf((x - mu) / sigma);
            ((i + 1) as f64 / n - cdf).max(cdf - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic Kolmogorov critical value at significance `alpha`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

pub fn fit_lognormal(samples: &[f64]) -> Result<LogNormalFit, StatsError> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(StatsError::TooFewSamples { min: MIN_FIT_SAMPLES, got: samples.len() });
    }
    if let Some((index, &value)) = samples.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v.is_finite())) {
        return Err(StatsError::NonPositive { index, value });
    }
    let logs: Vec<f64> = samples.iter().map(|x| x.ln()).collect();
    let n = logs.len() as f64;
    let (mu_j, sigma_j) = if logs.iter().all(|&l| l == logs[0]) {
        (logs[0], 0.0)
    } else {
        let mu = logs.iter().sum::<f64>() / n;
        (mu, (logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / n).sqrt())
    };
    let (mean_ej, var_ej) = lognormal_moments(mu_j, sigma_j);
    let (sample_mean, sample_std, sample_skewness) = describe(samples);
    Ok(LogNormalFit {
        mu_j,
        sigma_j,
        mean_ej,
        std_ej: var_ej.sqrt(),
        n: samples.len(),
        ks_statistic: ks_statistic_normal(&logs, mu_j, sigma_j),
        sample_mean,
        sample_std,
        sample_skewness,
    })
}

impl LogNormalFit {
    pub fn pdf(&self, x: f64) -> f64 {
        lognormal_pdf(x, self.mu_j, self.sigma_j)
    }

    /// Skewness of the fitted distribution.
    pub fn skewness(&self) -> f64 {
        let w = (self.sigma_j * self.sigma_j).exp();
        (w + 2.0) * (w - 1.0).sqrt()
    }
}

/// Ordinary least-squares `(slope, intercept)` of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Transmon 0-1 frequency from first-order propagation of the E_J spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmonEstimate {
    pub e_c_ghz: f64,
    pub f01_mean_ghz: f64,
    pub f01_std_ghz: f64,
}

/// `f01 = sqrt(8 E_C E_J) - E_C` and `df01 = sqrt(2 E_C / E_J) dE_J`,
/// all in GHz.
pub fn transmon_frequency(mean_ej: f64, std_ej: f64, e_c: f64) -> Result<TransmonEstimate, StatsError> {
    if !(e_c > 0.0 && mean_ej > e_c) {
        return Err(StatsError::OutsideTransmonRegime { e_j: mean_ej, e_c });
    }
    Ok(TransmonEstimate {
        e_c_ghz: e_c,
        f01_mean_ghz: (8.0 * e_c * mean_ej).sqrt() - e_c,
        f01_std_ghz: (2.0 * e_c / mean_ej).sqrt() * std_ej,
    })
}

/// Density-normalized histogram with uniform bins spanning `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub centers: Vec<f64>,
    pub densities: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn integral(&self) -> f64 {
        self.densities.iter().zip(self.edges.windows(2)).map(|(d, w)| d * (w[1] - w[0])).sum()
    }
}

pub fn histogram(samples: &[f64], n_bins: usize) -> Result<Histogram, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::Empty);
    }
    if n_bins < 2 {
        return Err(StatsError::TooFewBins(n_bins));
    }
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if max > min { (min, max) } else { (min - 0.5, min + 0.5) };
    let width = (hi - lo) / n_bins as f64;
    let edges: Vec<f64> = (0..=n_bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0usize; n_bins];
    for &x in samples {
        let b = (((x - lo) / width).floor() as usize).min(n_bins - 1);
        counts[b] += 1;
    }
    let n = samples.len() as f64;
    let densities = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (n * (w[1] - w[0])))
        .collect();
    let centers = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    Ok(Histogram { edges, centers, densities, counts })
}
