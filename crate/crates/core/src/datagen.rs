//! Seeded Zipf and Hurwitz (Zipf-Mandelbrot) stream generators over a finite
//! universe of ranks `1..=U`.
//!
//! Rank `x` has weight `x^-(rho+1)` (Zipf) or `(x+a)^-(rho+1)` (Hurwitz);
//! probabilities are weights divided by their direct sum over the universe.
//! Draws use inverse-CDF lookup, a binary search over cumulative weights,
//! driven by `ChaCha8Rng` from `rand_chacha` 0.9, whose output is stable for
//! a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::summary::Item;

pub const DEFAULT_UNIVERSE: u64 = 1_000_000;
pub const DEFAULT_HURWITZ_SHIFT: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Zipf,
    Hurwitz,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Zipf => "zipf",
            Family::Hurwitz => "hurwitz",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "zipf" => Ok(Family::Zipf),
            "hurwitz" => Ok(Family::Hurwitz),
            other => Err(format!("unknown family {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistSpec {
    pub family: Family,
    /// Skew; the weight exponent is `rho + 1`.
    pub rho: f64,
    /// Shift, used by the Hurwitz family only.
    pub a: f64,
    pub universe: u64,
    pub seed: u64,
}

impl DistSpec {
    pub fn zipf(rho: f64, universe: u64, seed: u64) -> Self {
        DistSpec {
            family: Family::Zipf,
            rho,
            a: 0.0,
            universe,
            seed,
        }
    }

    pub fn hurwitz(rho: f64, a: f64, universe: u64, seed: u64) -> Self {
        DistSpec {
            family: Family::Hurwitz,
            rho,
            a,
            universe,
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        DistSpec { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "rho must be positive, got {}",
                self.rho
            )));
        }
        if self.family == Family::Hurwitz && !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "hurwitz shift a must be positive, got {}",
                self.a
            )));
        }
        if self.universe == 0 {
            return Err(Error::InvalidDistribution(
                "universe must hold at least one item".into(),
            ));
        }
        if self.universe > u32::MAX as u64 {
            return Err(Error::InvalidDistribution(format!(
                "universe {} does not fit 32-bit items",
                self.universe
            )));
        }
        Ok(())
    }

    /// Unnormalized weight of rank `x`.
    pub fn weight(&self, x: u64) -> f64 {
        let shift = match self.family {
            Family::Zipf => 0.0,
            Family::Hurwitz => self.a,
        };
        (x as f64 + shift).powf(-(self.rho + 1.0))
    }
}

/// A spec with its normalizer and cumulative weights precomputed.
#[derive(Clone, Debug)]
pub struct Distribution {
    spec: DistSpec,
    norm: f64,
    cumulative: Vec<f64>,
}

impl Distribution {
    pub fn new(spec: DistSpec) -> Result<Self> {
        spec.validate()?;
        let u = spec.universe as usize;
        let mut weights: Vec<f64> = (1..=spec.universe).map(|x| spec.weight(x)).collect();
        // Smallest terms first keeps the direct sum accurate.
        let norm: f64 = weights.iter().rev().sum();
        let mut acc = 0.0;
        for w in weights.iter_mut() {
            acc += *w;
            *w = acc;
        }
        debug_assert_eq!(weights.len(), u);
        Ok(Distribution {
            spec,
            norm,
            cumulative: weights,
        })
    }

    pub fn spec(&self) -> &DistSpec {
        &self.spec
    }

    pub fn normalizer(&self) -> f64 {
        self.norm
    }

    pub fn probability(&self, x: u64) -> Result<f64> {
        if x == 0 || x > self.spec.universe {
            return Err(Error::RankOutOfUniverse {
                x,
                universe: self.spec.universe,
            });
        }
        Ok(self.spec.weight(x) / self.norm)
    }

    /// Draws `n` ranks with the spec's seed.
    pub fn sample_stream(&self, n: usize) -> Vec<Item> {
        self.sample_seeded(self.spec.seed, n)
    }

    /// Draws `n` ranks with another seed, reusing the precomputed table.
    pub fn sample_seeded(&self, seed: u64, n: usize) -> Vec<Item> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample(&mut rng)).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Item {
        let total = *self.cumulative.last().expect("non-empty universe");
        let target = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        Item(idx.min(self.cumulative.len() - 1) as u32 + 1)
    }
}

/// Probability of rank `x` under `spec`.
pub fn probability(spec: &DistSpec, x: u64) -> Result<f64> {
    Distribution::new(*spec)?.probability(x)
}

/// `n` i.i.d. draws from `spec`, deterministic in `spec.seed`. A stream is a
/// prefix of any longer stream drawn with the same spec.
pub fn sample_stream(spec: &DistSpec, n: usize) -> Result<Vec<Item>> {
    Ok(Distribution::new(*spec)?.sample_stream(n))
}
