//! Maximum-likelihood fits for the families that drive channel generation.
//!
//! Count fitters take the unshifted counts (`N >= 1`, `M >= 1`) as `f64` so
//! every family shares one sample type in [`compare_distributions`].

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, DiscreteCDF, Normal, Poisson};
use statrs::function::factorial::ln_factorial;

use super::AnalysisError;

/// Fewest samples [`compare_distributions`] accepts.
pub const MIN_COMPARE_SAMPLES: usize = 20;

const BETA_GRID_STEP: f64 = 1e-3;
const LL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    ShiftedPoisson,
    CompositeSubpath,
    Exponential,
    Lognormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FittedDistribution {
    /// `N = 1 + Poisson(lambda)`.
    ShiftedPoisson { lambda: f64 },
    /// `M = 1 + M'`, with `M' = 0` w.p. `1 - beta` and `floor(Exp(mu_s))`
    /// otherwise. `mu_s` is `None` when no sample exceeds 1.
    CompositeSubpath { beta: f64, mu_s: Option<f64> },
    Exponential { mu: f64 },
    /// Mean and population standard deviation of `ln x`.
    Lognormal { mu: f64, sigma: f64 },
}

impl FittedDistribution {
    pub fn family(&self) -> Family {
        match self {
            FittedDistribution::ShiftedPoisson { .. } => Family::ShiftedPoisson,
            FittedDistribution::CompositeSubpath { .. } => Family::CompositeSubpath,
            FittedDistribution::Exponential { .. } => Family::Exponential,
            FittedDistribution::Lognormal { .. } => Family::Lognormal,
        }
    }

    /// CDF at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            FittedDistribution::ShiftedPoisson { lambda } => {
                if x < 1.0 {
                    0.0
                } else if lambda == 0.0 {
                    1.0
                } else {
                    let k = (x.floor() - 1.0) as u64;
                    Poisson::new(lambda).map_or(f64::NAN, |p| p.cdf(k))
                }
            }
            FittedDistribution::CompositeSubpath { beta, mu_s } => {
                if x < 1.0 {
                    0.0
                } else {
                    let q = mu_s.map_or(0.0, |mu| if mu > 0.0 { (-1.0 / mu).exp() } else { 0.0 });
                    1.0 - beta * q.powf(x.floor())
                }
            }
            FittedDistribution::Exponential { mu } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x / mu).exp_m1()
                }
            }
            FittedDistribution::Lognormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else if sigma == 0.0 {
                    if x.ln() >= mu {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    Normal::new(mu, sigma).map_or(f64::NAN, |n| n.cdf(x.ln()))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub distribution: FittedDistribution,
    pub log_likelihood: f64,
    pub sample_count: usize,
}

fn require_samples(samples: &[f64]) -> Result<(), AnalysisError> {
    if samples.is_empty() {
        return Err(AnalysisError::EmptySamples);
    }
    Ok(())
}

/// Validates count samples and returns them shifted down by one.
fn shifted_counts(samples: &[f64]) -> Result<Vec<u64>, AnalysisError> {
    require_samples(samples)?;
    samples
        .iter()
        .map(|&v| {
            if v.fract() != 0.0 || !(v >= 1.0) {
                Err(AnalysisError::InvalidSample {
                    value: v,
                    reason: "counts must be integers >= 1",
                })
            } else {
                Ok(v as u64 - 1)
            }
        })
        .collect()
}

/// `lambda = mean(N - 1)`.
pub fn fit_poisson_shifted(samples: &[f64]) -> Result<FitReport, AnalysisError> {
    let k = shifted_counts(samples)?;
    let n = k.len() as f64;
    let lambda = k.iter().sum::<u64>() as f64 / n;
    let log_likelihood = k
        .iter()
        .map(|&k| {
            let kf = k as f64;
            let term = if k == 0 { 0.0 } else { kf * lambda.ln() };
            term - lambda - ln_factorial(k)
        })
        .sum();
    Ok(FitReport {
        distribution: FittedDistribution::ShiftedPoisson { lambda },
        log_likelihood,
        sample_count: k.len(),
    })
}

/// Sufficient statistics of shifted subpath counts.
#[derive(Debug, Clone, Copy)]
struct CompositeStats {
    zeros: f64,
    positives: f64,
    /// Sum of positive `M'`.
    total: f64,
}

impl CompositeStats {
    /// Log-likelihood at `(beta, q)` with `q = exp(-1 / mu_s)`.
    fn log_likelihood(&self, beta: f64, q: f64) -> f64 {
        let xlogy = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * y.ln() };
        xlogy(self.zeros, 1.0 - beta * q)
            + xlogy(self.positives, beta)
            + xlogy(self.total, q)
            + xlogy(self.positives, 1.0 - q)
    }

    /// Maximizes over `q` at fixed `beta` with bracketed Newton steps. The
    /// objective is concave in `q`, so the root of the score is unique.
    fn best_q(&self, beta: f64) -> f64 {
        if self.total == 0.0 {
            return 0.0;
        }
        let score = |q: f64| -self.zeros * beta / (1.0 - beta * q) + self.total / q - self.positives / (1.0 - q);
        let slope = |q: f64| {
            -self.zeros * beta * beta / (1.0 - beta * q).powi(2)
                - self.total / (q * q)
                - self.positives / (1.0 - q).powi(2)
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut q = 0.5;
        for _ in 0..200 {
            let g = score(q);
            if g > 0.0 {
                lo = q;
            } else {
                hi = q;
            }
            let mut next = q - g / slope(q);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - q).abs() <= 1e-15 * q.max(1e-300) || hi - lo <= f64::EPSILON * hi {
                return next;
            }
            q = next;
        }
        q
    }

    fn profile(&self, beta: f64) -> (f64, f64) {
        let q = self.best_q(beta);
        (self.log_likelihood(beta, q), q)
    }
}

/// Numerical MLE of `(beta, mu_s)` on `M' = M - 1`.
///
/// `beta` is scanned on a 0.001 grid over (0, 1] with `q` maximized at each
/// point, then refined by golden-section search around the best grid value.
/// If every sample is 1 the fit is `beta = 0` with `mu_s = None`.
pub fn fit_composite_subpath(samples: &[f64]) -> Result<FitReport, AnalysisError> {
    let k = shifted_counts(samples)?;
    let stats = CompositeStats {
        zeros: k.iter().filter(|&&v| v == 0).count() as f64,
        positives: k.iter().filter(|&&v| v > 0).count() as f64,
        total: k.iter().map(|&v| v as f64).sum(),
    };
    let report = |beta: f64, mu_s: Option<f64>, log_likelihood: f64| FitReport {
        distribution: FittedDistribution::CompositeSubpath { beta, mu_s },
        log_likelihood,
        sample_count: k.len(),
    };
    if stats.positives == 0.0 {
        return Ok(report(0.0, None, 0.0));
    }

    let steps = (1.0 / BETA_GRID_STEP).round() as usize;
    let (best_i, (mut best_ll, mut best_q)) = (1..=steps)
        .map(|i| (i, stats.profile(i as f64 * BETA_GRID_STEP)))
        .fold((0, (f64::NEG_INFINITY, 0.0)), |acc, cur| if cur.1 .0 > acc.1 .0 { cur } else { acc });
    let mut best_beta = best_i as f64 * BETA_GRID_STEP;

    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let mut lo = ((best_i - 1) as f64 * BETA_GRID_STEP).max(f64::MIN_POSITIVE);
    let mut hi = ((best_i + 1) as f64 * BETA_GRID_STEP).min(1.0);
    let mut c = hi - invphi * (hi - lo);
    let mut d = lo + invphi * (hi - lo);
    let (mut fc, mut fd) = (stats.profile(c).0, stats.profile(d).0);
    for _ in 0..200 {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = stats.profile(c).0;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = stats.profile(d).0;
        }
        if (fc - fd).abs() < LL_TOLERANCE && hi - lo < 1e-9 {
            break;
        }
    }
    for beta in [0.5 * (lo + hi), hi] {
        let (ll, q) = stats.profile(beta);
        if ll > best_ll {
            (best_beta, best_ll, best_q) = (beta, ll, q);
        }
    }
    let mu_s = if best_q > 0.0 { -1.0 / best_q.ln() } else { 0.0 };
    Ok(report(best_beta, Some(mu_s), best_ll))
}

/// `mu = mean(x)` for `x >= 0`.
pub fn fit_exponential(samples: &[f64]) -> Result<FitReport, AnalysisError> {
    require_samples(samples)?;
    if let Some(&bad) = samples.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(AnalysisError::InvalidSample {
            value: bad,
            reason: "exponential samples must be finite and >= 0",
        });
    }
    let n = samples.len() as f64;
    let mu = samples.iter().sum::<f64>() / n;
    if mu == 0.0 {
        return Err(AnalysisError::InvalidSample {
            value: 0.0,
            reason: "all samples are zero",
        });
    }
    Ok(FitReport {
        distribution: FittedDistribution::Exponential { mu },
        log_likelihood: -n * mu.ln() - n,
        sample_count: samples.len(),
    })
}

/// Mean and population standard deviation of `ln x` for `x > 0`.
pub fn fit_lognormal(samples: &[f64]) -> Result<FitReport, AnalysisError> {
    require_samples(samples)?;
    if let Some(&bad) = samples.iter().find(|v| !(**v > 0.0)) {
        return Err(AnalysisError::NonPositiveSample(bad));
    }
    let n = samples.len() as f64;
    let logs: Vec<f64> = samples.iter().map(|v| v.ln()).collect();
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu) * (l - mu)).sum::<f64>() / n;
    let sigma = var.sqrt();
    let log_likelihood = if sigma == 0.0 {
        f64::INFINITY
    } else {
        -logs.iter().sum::<f64>() - n * sigma.ln() - 0.5 * n * (2.0 * std::f64::consts::PI).ln() - 0.5 * n
    };
    Ok(FitReport {
        distribution: FittedDistribution::Lognormal { mu, sigma },
        log_likelihood,
        sample_count: samples.len(),
    })
}

pub fn fit_family(family: Family, samples: &[f64]) -> Result<FitReport, AnalysisError> {
    match family {
        Family::ShiftedPoisson => fit_poisson_shifted(samples),
        Family::CompositeSubpath => fit_composite_subpath(samples),
        Family::Exponential => fit_exponential(samples),
        Family::Lognormal => fit_lognormal(samples),
    }
}

/// One-sample Kolmogorov-Smirnov statistic against `dist`.
pub fn ks_statistic(samples: &[f64], dist: &FittedDistribution) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let discrete = matches!(dist.family(), Family::ShiftedPoisson | Family::CompositeSubpath);
    let mut d = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let below = i as f64 / n;
        let mut j = i;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        let at = j as f64 / n;
        let f = dist.cdf(v);
        let f_before = if discrete { dist.cdf(v - 1.0) } else { f };
        d = d.max((at - f).abs()).max((below - f_before).abs());
        i = j;
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFit {
    pub report: FitReport,
    pub ks_statistic: f64,
}

/// Fits every family in `families` and ranks them by log-likelihood,
/// best first.
pub fn compare_distributions(samples: &[f64], families: &[Family]) -> Result<Vec<RankedFit>, AnalysisError> {
    if samples.len() < MIN_COMPARE_SAMPLES {
        return Err(AnalysisError::TooFewSamples {
            needed: MIN_COMPARE_SAMPLES,
            got: samples.len(),
        });
    }
    let mut ranked = families
        .iter()
        .map(|&f| {
            let report = fit_family(f, samples)?;
            let ks_statistic = ks_statistic(samples, &report.distribution);
            Ok(RankedFit { report, ks_statistic })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    ranked.sort_by(|a, b| b.report.log_likelihood.total_cmp(&a.report.log_likelihood));
    Ok(ranked)
}
