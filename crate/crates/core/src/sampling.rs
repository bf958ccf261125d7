//! Seeded randomness shared by the randomized solvers.
//!
//! [`RngState`] wraps a ChaCha8 stream cipher generator. ChaCha is counter
//! based, so `(seed, stream)` pairs give independent, platform-stable
//! sequences; the harness hands one stream to each trial.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{IlsError, Result};

#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `stream` under the same seed.
    pub fn stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on `{0, …, n-1}`. `n` must be positive.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }
}

/// Samples index `j` with probability `weight[j] / total` by binary search
/// over prefix sums.
#[derive(Debug, Clone)]
pub struct WeightedSampler {
    cumulative: Vec<f64>,
    total: f64,
}

impl WeightedSampler {
    pub fn new(weights: &[f64]) -> Result<Self> {
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for (j, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(IlsError::Parameter(format!(
                    "weight {j} is {w}; weights must be finite and nonnegative"
                )));
            }
            acc += w;
            cumulative.push(acc);
        }
        if acc <= 0.0 || !acc.is_finite() {
            return Err(IlsError::DegenerateWeights);
        }
        Ok(Self {
            cumulative,
            total: acc,
        })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn probability(&self, j: usize) -> f64 {
        let prev = if j == 0 { 0.0 } else { self.cumulative[j - 1] };
        (self.cumulative[j] - prev) / self.total
    }

    pub fn sample(&self, rng: &mut RngState) -> usize {
        let u = rng.uniform() * self.total;
        let j = self.cumulative.partition_point(|&c| c <= u);
        if j < self.cumulative.len() {
            j
        } else {
            // u rounded up to total: fall back to the last positive weight.
            self.cumulative
                .iter()
                .rposition(|&c| c < self.total)
                .map_or(0, |k| k + 1)
        }
    }
}

/// Free-function form of [`WeightedSampler::sample`].
pub fn sample_weighted(sampler: &WeightedSampler, rng: &mut RngState) -> usize {
    sampler.sample(rng)
}

/// Uniform `alpha`-subsets of `{0, …, n-1}` by partial Fisher–Yates on a
/// persistent permutation buffer. Reusing the buffer keeps each draw
/// `O(alpha)`; partial Fisher–Yates is uniform from any starting order.
#[derive(Debug, Clone)]
pub struct SubsetSampler {
    perm: Vec<usize>,
}

impl SubsetSampler {
    pub fn new(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// The returned slice holds `alpha` distinct indices in random order.
    pub fn sample(&mut self, alpha: usize, rng: &mut RngState) -> Result<&[usize]> {
        let n = self.perm.len();
        if alpha == 0 || alpha > n {
            return Err(IlsError::Parameter(format!(
                "subset size {alpha} must lie in [1, {n}]"
            )));
        }
        for i in 0..alpha {
            let k = i + rng.below(n - i);
            self.perm.swap(i, k);
        }
        Ok(&self.perm[..alpha])
    }
}

/// One-shot uniform `alpha`-subset of `{0, …, n-1}`.
pub fn sample_uniform_subset(n: usize, alpha: usize, rng: &mut RngState) -> Result<Vec<usize>> {
    let mut s = SubsetSampler::new(n);
    Ok(s.sample(alpha, rng)?.to_vec())
}

/// How the subset size α is drawn at each sampling-coordinate-descent step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaPolicy {
    /// α uniform on `{1, …, n}`.
    #[default]
    Uniform,
    /// α = `min(k, n)`.
    Fixed(usize),
}

impl AlphaPolicy {
    pub fn validate(&self) -> Result<()> {
        match self {
            AlphaPolicy::Fixed(0) => Err(IlsError::Parameter("fixed alpha must be >= 1".into())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for AlphaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaPolicy::Uniform => write!(f, "uniform"),
            AlphaPolicy::Fixed(k) => write!(f, "fixed:{k}"),
        }
    }
}

impl FromStr for AlphaPolicy {
    type Err = IlsError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "uniform" {
            return Ok(AlphaPolicy::Uniform);
        }
        let k = s
            .strip_prefix("fixed:")
            .and_then(|k| k.parse::<usize>().ok())
            .ok_or_else(|| {
                IlsError::Parameter(format!(
                    "alpha policy `{s}`: expected `uniform` or `fixed:K`"
                ))
            })?;
        let policy = AlphaPolicy::Fixed(k);
        policy.validate()?;
        Ok(policy)
    }
}

pub fn sample_alpha(policy: AlphaPolicy, n: usize, rng: &mut RngState) -> Result<usize> {
    if n == 0 {
        return Err(IlsError::Parameter("alpha needs n >= 1".into()));
    }
    match policy {
        AlphaPolicy::Uniform => Ok(1 + rng.below(n)),
        AlphaPolicy::Fixed(0) => Err(IlsError::Parameter("fixed alpha must be >= 1".into())),
        AlphaPolicy::Fixed(k) => Ok(k.min(n)),
    }
}
