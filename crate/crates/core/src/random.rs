//! Deterministic, label-addressed random streams.
//!
//! A stream is identified by `(master_seed, drop_index, label)`. The three
//! values form the ChaCha8 key directly, so a stream's output never depends
//! on how many other streams exist or in which order they are consumed.
//!
//! Every family is sampled with a fixed number of uniforms per draw:
//! one for uniform, exponential, shifted Poisson and discrete uniform; two for
//! normal and lognormal (Box-Muller, cosine branch only) and for the composite
//! subpath law (one mixture selector, one exponential).

use std::f64::consts::TAU;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamProvenance {
    pub master_seed: u64,
    pub drop_index: u64,
    pub label: String,
}

pub struct RandomStream {
    rng: ChaCha8Rng,
    provenance: StreamProvenance,
}

impl std::fmt::Debug for RandomStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RandomStream").field("provenance", &self.provenance).finish_non_exhaustive()
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Opens the stream for `(master_seed, drop_index, label)`.
pub fn fork_stream(master_seed: u64, drop_index: u64, label: &str) -> RandomStream {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&drop_index.to_le_bytes());
    key[16..24].copy_from_slice(&fnv1a(label.as_bytes()).to_le_bytes());
    key[24..32].copy_from_slice(&(label.len() as u64).to_le_bytes());
    RandomStream {
        rng: ChaCha8Rng::from_seed(key),
        provenance: StreamProvenance {
            master_seed,
            drop_index,
            label: label.to_string(),
        },
    }
}

/// Inverse CDF of Exp(mean `mu`) at `u` in [0, 1).
pub fn exponential_from_uniform(mu: f64, u: f64) -> f64 {
    -mu * (-u).ln_1p()
}

/// A distribution family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DistSpec {
    Uniform { a: f64, b: f64 },
    Normal { mu: f64, sigma: f64 },
    /// Parameterized by its mean.
    Exponential { mu: f64 },
    /// `mu`, `sigma` of the underlying normal.
    Lognormal { mu: f64, sigma: f64 },
    /// 1 + Poisson(lambda).
    PoissonShifted { lambda: f64 },
    /// Integers `lo..=hi`, equally likely.
    DiscreteUniform { lo: i64, hi: i64 },
    /// 1 + M' with P(M'=k) = (1-beta) [k=0] + beta * P(floor(Exp(mu_s)) = k).
    CompositeSubpath { beta: f64, mu_s: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("invalid parameters for {family}: {reason}")]
    InvalidParams { family: &'static str, reason: String },
}

impl DistSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            DistSpec::Uniform { .. } => "uniform",
            DistSpec::Normal { .. } => "normal",
            DistSpec::Exponential { .. } => "exponential",
            DistSpec::Lognormal { .. } => "lognormal",
            DistSpec::PoissonShifted { .. } => "poisson_shifted",
            DistSpec::DiscreteUniform { .. } => "discrete_uniform",
            DistSpec::CompositeSubpath { .. } => "composite_subpath",
        }
    }

    pub fn validate(&self) -> Result<(), DistError> {
        let fail = |reason: String| {
            Err(DistError::InvalidParams {
                family: self.family_name(),
                reason,
            })
        };
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match *self {
            DistSpec::Uniform { a, b } if !finite(&[a, b]) || a > b => fail(format!("need a <= b, got [{a}, {b}]")),
            DistSpec::Normal { mu, sigma } | DistSpec::Lognormal { mu, sigma }
                if !finite(&[mu, sigma]) || sigma < 0.0 =>
            {
                fail(format!("need sigma >= 0, got {sigma}"))
            }
            DistSpec::Exponential { mu } if !(mu > 0.0 && mu.is_finite()) => fail(format!("need mu > 0, got {mu}")),
            DistSpec::PoissonShifted { lambda } if !(lambda >= 0.0 && lambda.is_finite()) => {
                fail(format!("need lambda >= 0, got {lambda}"))
            }
            DistSpec::DiscreteUniform { lo, hi } if lo > hi => fail(format!("need lo <= hi, got {lo} > {hi}")),
            DistSpec::CompositeSubpath { beta, mu_s }
                if !(0.0..=1.0).contains(&beta) || !(mu_s >= 0.0 && mu_s.is_finite()) =>
            {
                fail(format!("need beta in [0,1] and mu_s >= 0, got ({beta}, {mu_s})"))
            }
            _ => Ok(()),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            DistSpec::PoissonShifted { .. } | DistSpec::DiscreteUniform { .. } | DistSpec::CompositeSubpath { .. }
        )
    }
}

/// A drawn value: real for continuous families, integer for counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sample {
    Real(f64),
    Count(i64),
}

impl Sample {
    pub fn as_f64(self) -> f64 {
        match self {
            Sample::Real(x) => x,
            Sample::Count(k) => k as f64,
        }
    }
}

impl RandomStream {
    pub fn provenance(&self) -> &StreamProvenance {
        &self.provenance
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.next_uniform()
    }

    pub fn standard_normal(&mut self) -> f64 {
        // 1 - u lies in (0, 1], keeping ln finite
        let u1 = 1.0 - self.next_uniform();
        let u2 = self.next_uniform();
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    }

    pub fn normal(&mut self, mu: f64, sigma: f64) -> f64 {
        mu + sigma * self.standard_normal()
    }

    pub fn exponential(&mut self, mu: f64) -> f64 {
        exponential_from_uniform(mu, self.next_uniform())
    }

    pub fn lognormal(&mut self, mu: f64, sigma: f64) -> f64 {
        self.normal(mu, sigma).exp()
    }

    /// Poisson(lambda) by sequential search of the CDF.
    pub fn poisson(&mut self, lambda: f64) -> u64 {
        let u = self.next_uniform();
        let mut k = 0u64;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        while u >= cdf {
            k += 1;
            p *= lambda / k as f64;
            let next = cdf + p;
            if next == cdf {
                // tail mass below f64 resolution
                break;
            }
            cdf = next;
        }
        k
    }

    /// Integer uniform on `lo..=hi`.
    pub fn discrete_uniform(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo + 1) as f64;
        let k = (self.next_uniform() * span).floor() as i64;
        lo + k.min(hi - lo)
    }

    /// The shifted-by-one composite subpath count.
    pub fn composite_subpath(&mut self, beta: f64, mu_s: f64) -> u64 {
        let select = self.next_uniform();
        let u = self.next_uniform();
        if select < beta {
            1 + exponential_from_uniform(mu_s, u).floor() as u64
        } else {
            1
        }
    }

    pub fn sample(&mut self, spec: &DistSpec) -> Result<Sample, DistError> {
        spec.validate()?;
        Ok(match *spec {
            DistSpec::Uniform { a, b } => Sample::Real(self.uniform(a, b)),
            DistSpec::Normal { mu, sigma } => Sample::Real(self.normal(mu, sigma)),
            DistSpec::Exponential { mu } => Sample::Real(self.exponential(mu)),
            DistSpec::Lognormal { mu, sigma } => Sample::Real(self.lognormal(mu, sigma)),
            DistSpec::PoissonShifted { lambda } => Sample::Count(1 + self.poisson(lambda) as i64),
            DistSpec::DiscreteUniform { lo, hi } => Sample::Count(self.discrete_uniform(lo, hi)),
            DistSpec::CompositeSubpath { beta, mu_s } => Sample::Count(self.composite_subpath(beta, mu_s) as i64),
        })
    }
}
