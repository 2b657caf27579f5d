//! Monte Carlo profiles from independent Poisson counts conditioned on the
//! total size.
//!
//! For any tilt `x > 0`, drawing `Z_j ~ Poisson(lambda_j x^j)` for `j <= n`
//! and keeping the draw when `sum j Z_j = n` yields a profile with the exact
//! uniform-assembly law. Work is split into a fixed number of ChaCha streams
//! so results depend on the seed and stream count but not on thread count.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::additive::AdditiveFunction;
use crate::error::{Error, Result};
use crate::number::{Accumulator, CompensatedSum};
use crate::oracle::Profile;
use crate::registry::AssemblyClass;

/// Poisson means up to this value are drawn by inversion.
pub const INVERSION_LIMIT: f64 = 10.0;
pub const DEFAULT_STREAMS: usize = 16;
pub const DEFAULT_MAX_REJECTIONS: u64 = 10_000_000;
const TILT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    /// `None` tunes the tilt with [`tune_tilt`].
    pub tilt: Option<f64>,
    /// Rejections tolerated before a single acceptance.
    pub max_rejections: u64,
    pub seed: u64,
    /// Number of independent generator streams; fixes the output layout.
    pub streams: usize,
}

impl SamplerConfig {
    pub fn new(seed: u64) -> Self {
        SamplerConfig {
            tilt: None,
            max_rejections: DEFAULT_MAX_REJECTIONS,
            seed,
            streams: DEFAULT_STREAMS,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(x) = self.tilt {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "tilt must be positive, got {x}"
                )));
            }
        }
        if self.max_rejections == 0 {
            return Err(Error::InvalidArgument(
                "max_rejections must be at least 1".into(),
            ));
        }
        if self.streams == 0 {
            return Err(Error::InvalidArgument("streams must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tilt {
    pub value: f64,
    /// True when no root existed in `(0, rho]` and `rho` was used instead.
    pub clamped: bool,
}

fn mean_size(ln_weights: &[f64], x: f64) -> f64 {
    let ln_x = x.ln();
    let mut acc = CompensatedSum::new();
    for (i, &lw) in ln_weights.iter().enumerate() {
        let j = (i + 1) as f64;
        if lw > f64::NEG_INFINITY {
            acc.push((lw + j * ln_x + j.ln()).exp());
        }
    }
    acc.total()
}

/// Solves `sum_{j<=n} j lambda_j x^j = n` on `(0, rho]` by bisection,
/// falling back to `rho` when there is no root.
pub fn tune_tilt(class: &AssemblyClass, n: usize) -> Result<Tilt> {
    solve_tilt(class, n, class.rho().to_f64())
}

/// Same equation on `(0, upper]`. Since only sizes `j <= n` enter, any
/// finite `upper` is admissible; roots beyond the radius give the highest
/// acceptance rate for classes whose radius is nominal.
pub fn solve_tilt(class: &AssemblyClass, n: usize, upper: f64) -> Result<Tilt> {
    if !(upper > 0.0 && upper.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tilt bound must be positive, got {upper}"
        )));
    }
    let ln_weights: Vec<f64> = (1..=n).map(|j| class.ln_lambda(j)).collect();
    if ln_weights.iter().all(|&w| w == f64::NEG_INFINITY) {
        return Err(Error::NoTilt);
    }
    let target = n as f64;
    if mean_size(&ln_weights, upper) < target - TILT_TOL {
        return Ok(Tilt {
            value: upper,
            clamped: true,
        });
    }
    let (mut lo, mut hi) = (0.0, upper);
    let mut mid = upper;
    for _ in 0..200 {
        if (mean_size(&ln_weights, mid) - target).abs() <= TILT_TOL {
            break;
        }
        mid = 0.5 * (lo + hi);
        if mean_size(&ln_weights, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Tilt {
        value: mid,
        clamped: false,
    })
}

fn poisson<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean > INVERSION_LIMIT {
        let d = Poisson::new(mean).expect("finite positive mean");
        return d.sample(rng) as u64;
    }
    let u: f64 = rng.random();
    let mut p = (-mean).exp();
    let mut cdf = p;
    let mut k = 0u64;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        if next == cdf {
            break;
        }
        cdf = next;
    }
    k
}

/// Poisson means for one order and tilt.
#[derive(Debug, Clone)]
pub struct Sampler {
    n: usize,
    means: Vec<f64>,
    tilt: Tilt,
    max_rejections: u64,
}

/// One accepted profile and the rejections that preceded it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDraw {
    pub profile: Profile,
    pub rejected: u64,
}

impl Sampler {
    pub fn new(class: &AssemblyClass, n: usize, config: &SamplerConfig) -> Result<Self> {
        config.validate()?;
        if !class.support(n)[n] {
            return Err(Error::EmptySupport { n });
        }
        let tilt = match config.tilt {
            Some(value) => Tilt {
                value,
                clamped: false,
            },
            None if n == 0 => Tilt {
                value: class.rho().to_f64(),
                clamped: false,
            },
            None => tune_tilt(class, n)?,
        };
        let ln_x = tilt.value.ln();
        let means = (1..=n)
            .map(|j| (class.ln_lambda(j) + j as f64 * ln_x).exp())
            .collect();
        Ok(Sampler {
            n,
            means,
            tilt,
            max_rejections: config.max_rejections,
        })
    }

    pub fn tilt(&self) -> Tilt {
        self.tilt
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> Result<SampleDraw> {
        let mut rejected = 0u64;
        let mut counts = vec![0usize; self.n];
        loop {
            let mut total = 0usize;
            for (i, &m) in self.means.iter().enumerate() {
                let z = poisson(rng, m) as usize;
                counts[i] = z;
                total = total.saturating_add(z.saturating_mul(i + 1));
                if total > self.n {
                    break;
                }
            }
            if total == self.n {
                return Ok(SampleDraw {
                    profile: Profile {
                        multiplicities: counts,
                    },
                    rejected,
                });
            }
            counts.iter_mut().for_each(|c| *c = 0);
            rejected += 1;
            if rejected >= self.max_rejections {
                return Err(Error::RejectionLimit {
                    limit: self.max_rejections,
                    rate: 0.0,
                });
            }
        }
    }
}

fn stream_rng(seed: u64, stream: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// A single profile from stream 0 of the configured seed.
pub fn sample_profile(
    class: &AssemblyClass,
    n: usize,
    config: &SamplerConfig,
) -> Result<SampleDraw> {
    let sampler = Sampler::new(class, n, config)?;
    sampler.draw(&mut stream_rng(config.seed, 0))
}

/// Accepted profiles in stream order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub n: usize,
    pub profiles: Vec<Profile>,
    pub rejected: u64,
    pub tilt: Tilt,
    pub seed: u64,
    pub streams: usize,
}

impl SampleBatch {
    pub fn accepted(&self) -> u64 {
        self.profiles.len() as u64
    }

    /// `accepted / (accepted + rejected)`.
    pub fn acceptance_rate(&self) -> f64 {
        let accepted = self.accepted();
        accepted as f64 / (accepted + self.rejected) as f64
    }

    /// Histogram of `k_j` over the batch, indexed by `k = 0..=n/j`.
    pub fn marginal(&self, j: usize) -> Vec<u64> {
        let mut hist = vec![0u64; self.n / j.max(1) + 1];
        for p in &self.profiles {
            hist[p.count(j)] += 1;
        }
        hist
    }

    pub fn metadata(&self, class: &str) -> SampleMetadata {
        SampleMetadata {
            class: class.to_string(),
            n: self.n,
            seed: self.seed,
            streams: self.streams,
            tilt: self.tilt.value,
            tilt_clamped: self.tilt.clamped,
            accepted: self.accepted(),
            rejected: self.rejected,
            acceptance_rate: self.acceptance_rate(),
        }
    }

    /// Sparse `sample,j,s_j` rows, one per nonzero multiplicity.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["sample", "j", "s_j"])?;
        for (i, p) in self.profiles.iter().enumerate() {
            for (j, s) in p.sparse() {
                w.write_record([i.to_string(), j.to_string(), s.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMetadata {
    pub class: String,
    pub n: usize,
    pub seed: u64,
    pub streams: usize,
    pub tilt: f64,
    pub tilt_clamped: bool,
    pub accepted: u64,
    pub rejected: u64,
    pub acceptance_rate: f64,
}

/// `reps` accepted profiles spread over the configured streams.
pub fn sample_profiles(
    class: &AssemblyClass,
    n: usize,
    reps: usize,
    config: &SamplerConfig,
) -> Result<SampleBatch> {
    let sampler = Sampler::new(class, n, config)?;
    let streams = config.streams;
    let per_stream: Vec<(usize, usize)> = (0..streams)
        .map(|s| (s, reps / streams + usize::from(s < reps % streams)))
        .collect();
    let results: Vec<Result<(Vec<Profile>, u64)>> = per_stream
        .into_par_iter()
        .map(|(s, count)| {
            let mut rng = stream_rng(config.seed, s);
            let mut profiles = Vec::with_capacity(count);
            let mut rejected = 0u64;
            for _ in 0..count {
                match sampler.draw(&mut rng) {
                    Ok(d) => {
                        rejected += d.rejected;
                        profiles.push(d.profile);
                    }
                    Err(Error::RejectionLimit { limit, .. }) => {
                        let accepted = profiles.len() as u64;
                        let rate = accepted as f64 / (accepted + rejected + limit) as f64;
                        return Err(Error::RejectionLimit { limit, rate });
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok((profiles, rejected))
        })
        .collect();
    let mut profiles = Vec::with_capacity(reps);
    let mut rejected = 0;
    for r in results {
        let (p, rej) = r?;
        profiles.extend(p);
        rejected += rej;
    }
    Ok(SampleBatch {
        n,
        profiles,
        rejected,
        tilt: sampler.tilt(),
        seed: config.seed,
        streams,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMoments {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    pub accepted: u64,
    pub rejected: u64,
    pub acceptance_rate: f64,
}

/// Sample mean and variance of `h` over a batch.
pub fn batch_moments(batch: &SampleBatch, h: &AdditiveFunction) -> EmpiricalMoments {
    let values: Vec<f64> = batch
        .profiles
        .iter()
        .map(|p| p.sparse().map(|(j, k)| h.h_f64(j, k)).sum())
        .collect();
    let reps = values.len() as f64;
    let mut sum = CompensatedSum::new();
    values.iter().for_each(|&v| sum.push(v));
    let mean = sum.total() / reps;
    let mut sq = CompensatedSum::new();
    values
        .iter()
        .for_each(|&v| sq.push((v - mean) * (v - mean)));
    let variance = if values.len() > 1 {
        sq.total() / (reps - 1.0)
    } else {
        0.0
    };
    EmpiricalMoments {
        mean,
        variance,
        stderr: (variance / reps).sqrt(),
        accepted: batch.accepted(),
        rejected: batch.rejected,
        acceptance_rate: batch.acceptance_rate(),
    }
}

pub fn empirical_moments(
    class: &AssemblyClass,
    n: usize,
    h: &AdditiveFunction,
    reps: usize,
    config: &SamplerConfig,
) -> Result<EmpiricalMoments> {
    if reps < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 replicas, got {reps}"
        )));
    }
    let batch = sample_profiles(class, n, reps, config)?;
    Ok(batch_moments(&batch, h))
}

/// Minimum expected count per bin after merging.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `observed` against `probabilities`.
///
/// Adjacent cells are merged left to right until each expected count is at
/// least [`MIN_EXPECTED`]; a short final cell joins its neighbour.
pub fn chi_square(observed: &[u64], probabilities: &[f64]) -> ChiSquareTest {
    let total: u64 = observed.iter().sum();
    let total = total as f64;
    let cells = observed.len().max(probabilities.len());
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for k in 0..cells {
        o += observed.get(k).copied().unwrap_or(0) as f64;
        e += probabilities.get(k).copied().unwrap_or(0.0) * total;
        if e >= MIN_EXPECTED {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if o > 0.0 || e > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => bins.push((o, e)),
        }
    }
    let statistic: f64 = bins
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e) * (o - e) / e } else { 0.0 })
        .sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .map(|d| d.sf(statistic))
            .unwrap_or(0.0)
    };
    ChiSquareTest {
        statistic,
        dof,
        p_value,
    }
}
