//! Random-path estimation of the number of unique configurations and the
//! Markov-inequality test against the `Γ(n/2+1)` null bound.
//!
//! One sample walks the census tree from the root, choosing uniformly among
//! the feasible branches at each level and multiplying the branching factors.
//! The product is an unbiased estimate of the number of leaves.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::census::Walker;
use crate::configurations::Configuration;
use crate::decimal;
use crate::error::{invalid, Result};
use crate::serde_ext;

pub use crate::gamma::{gamma_half_factorial, HalfFactorial};

/// Significant digits of the percentage renderings.
pub const PERCENT_DIGITS: usize = 15;
/// Minimum decimals of the percentage renderings.
pub const PERCENT_DECIMALS: usize = 14;
/// Significant digits of the null bound rendering.
pub const NULL_BOUND_DIGITS: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    /// `Π b_i`, or 0 when the walk hit a level with no feasible branch.
    #[serde(with = "serde_ext::biguint")]
    pub x_value: BigUint,
    /// `b_1, b_2, …` up to the level where the walk ended; a dead walk ends
    /// with a 0.
    pub branching_factors: Vec<u64>,
    pub path: Option<Configuration>,
}

impl Sample {
    pub fn is_dead(&self) -> bool {
        self.path.is_none()
    }

    /// Whether the recorded factors multiply to `x_value`.
    pub fn product_matches(&self) -> bool {
        let product: BigUint = self.branching_factors.iter().map(|&b| BigUint::from(b)).product();
        product == self.x_value
    }
}

/// One root-to-leaf walk.
pub fn branching_product<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Sample> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut walker = Walker::new(n, true);
    let mut x = BigUint::one();
    let mut factors = Vec::with_capacity(n);
    for _ in 0..n {
        let choices = walker.feasible_extensions()?;
        factors.push(choices.len() as u64);
        if choices.is_empty() {
            return Ok(Sample { x_value: BigUint::zero(), branching_factors: factors, path: None });
        }
        x *= choices.len();
        let pick = choices[rng.gen_range(0..choices.len())];
        let pushed = walker.try_push(pick)?;
        debug_assert!(pushed);
    }
    let path = Configuration::new(walker.prefix().to_vec())?;
    Ok(Sample { x_value: x, branching_factors: factors, path: Some(path) })
}

/// The generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Estimate {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub samples: Vec<Sample>,
    #[serde(with = "serde_ext::rational")]
    pub mean: BigRational,
}

impl Estimate {
    /// Unbiased sample variance of `X`; zero when `k = 1`.
    pub fn variance(&self) -> BigRational {
        sample_variance(&self.samples, &self.mean)
    }

    /// `|mean - target| ≤ z · s / √k`, decided exactly.
    pub fn within_standard_errors(&self, target: &BigRational, z: u32) -> bool {
        let dev = &self.mean - target;
        let lhs = &dev * &dev;
        let z2 = BigRational::from_integer(BigInt::from(z) * BigInt::from(z));
        let k = BigRational::from_integer(BigInt::from(self.k));
        lhs <= z2 * self.variance() / k
    }
}

fn sample_mean(samples: &[Sample]) -> BigRational {
    let total: BigUint = samples.iter().map(|s| &s.x_value).sum();
    BigRational::new(total.into(), BigInt::from(samples.len()))
}

fn sample_variance(samples: &[Sample], mean: &BigRational) -> BigRational {
    if samples.len() < 2 {
        return BigRational::zero();
    }
    let ss: BigRational = samples
        .iter()
        .map(|s| {
            let d = BigRational::from_integer(s.x_value.clone().into()) - mean;
            &d * &d
        })
        .sum();
    ss / BigRational::from_integer(BigInt::from(samples.len() - 1))
}

/// `k` independent walks; sample `i` draws from `sample_rng(seed, i)`, so the
/// list does not depend on scheduling.
pub fn estimate(n: usize, k: usize, seed: u64) -> Result<Estimate> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if k == 0 {
        return Err(invalid("at least one sample is required"));
    }
    let samples = (0..k as u64)
        .into_par_iter()
        .map(|i| branching_product(n, &mut sample_rng(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let mean = sample_mean(&samples);
    Ok(Estimate { n, k, seed, samples, mean })
}

/// `1 - 1/c`, or `None` when `c = 0`.
pub fn confidence_single(c: &BigUint) -> Option<BigRational> {
    if c.is_zero() {
        return None;
    }
    let c = BigRational::from_integer(c.clone().into());
    Some(BigRational::one() - c.recip())
}

/// `(1 - 1/c)^k`, or `None` when `c = 0`.
pub fn confidence_joint_bound(c: &BigUint, k: usize) -> Option<BigRational> {
    let single = confidence_single(c)?;
    let k = i32::try_from(k).expect("sample count fits in i32");
    Some(num_traits::pow::Pow::pow(single, k))
}

/// A probability as a percentage: 15 significant digits, at least 14
/// decimals.
pub fn percent(p: &BigRational) -> String {
    // Built unreduced: the joint bound can have tens of thousands of digits.
    let scaled = BigRational::new_raw(p.numer() * 100, p.denom().clone());
    decimal::significant(&scaled, PERCENT_DIGITS, PERCENT_DECIMALS)
}

pub const NULL_HYPOTHESIS: &str = "E[X] <= (n/2)!";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestReport {
    pub n: usize,
    pub k: usize,
    #[serde(with = "serde_ext::rational")]
    pub mean: BigRational,
    /// `s / √k` cut to `standard_error_precision` decimals.
    pub standard_error: String,
    pub standard_error_precision: usize,
    #[serde(with = "serde_ext::biguint")]
    pub max: BigUint,
    pub dead_paths: usize,
    /// `Γ(n/2+1)` to `null_bound_digits` significant digits.
    pub null_bound: String,
    pub null_bound_digits: usize,
    #[serde(with = "serde_ext::biguint")]
    pub c_n: BigUint,
    /// Single-sample Markov confidence `1 - 1/c_n`; the figure Table-2 style
    /// output prints.
    #[serde(with = "serde_ext::rational_opt")]
    pub confidence_single: Option<BigRational>,
    pub confidence_single_percent: Option<String>,
    /// k-sample joint bound `(1 - 1/c_n)^k`.
    pub confidence_joint_bound_percent: Option<String>,
    pub percent_digits: usize,
    pub null_hypothesis: String,
    pub rejected: bool,
}

pub const STANDARD_ERROR_PRECISION: usize = 6;

/// `⌊√v · 10^frac⌋ / 10^frac` as a decimal string.
fn sqrt_truncated(v: &BigRational, frac: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), 2 * frac);
    let scaled = (v.numer() * scale) / v.denom();
    let root = BigRational::new(scaled.sqrt(), num_traits::pow(BigInt::from(10), frac));
    decimal::truncate(&root, frac)
}

pub fn markov_test(samples: &[Sample], n: usize) -> Result<TestReport> {
    if samples.is_empty() {
        return Err(invalid("samples must be nonempty"));
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let k = samples.len();
    let mean = sample_mean(samples);
    let variance = sample_variance(samples, &mean);
    let se2 = &variance / BigRational::from_integer(BigInt::from(k));
    let max = samples.iter().map(|s| &s.x_value).max().cloned().unwrap_or_default();
    let bound = gamma_half_factorial(n as u64);
    let c_n = bound.floor_quotient(&max);
    let single = confidence_single(&c_n);
    let joint = confidence_joint_bound(&c_n, k);
    debug_assert!(single.as_ref().map_or(true, |p| !p.is_negative() && p <= &BigRational::one()));
    Ok(TestReport {
        n,
        k,
        mean,
        standard_error: sqrt_truncated(&se2, STANDARD_ERROR_PRECISION),
        standard_error_precision: STANDARD_ERROR_PRECISION,
        max,
        dead_paths: samples.iter().filter(|s| s.is_dead()).count(),
        null_bound: bound.significant(NULL_BOUND_DIGITS),
        null_bound_digits: NULL_BOUND_DIGITS,
        confidence_single_percent: single.as_ref().map(percent),
        confidence_joint_bound_percent: joint.as_ref().map(percent),
        confidence_single: single,
        percent_digits: PERCENT_DIGITS,
        null_hypothesis: NULL_HYPOTHESIS.to_string(),
        rejected: c_n >= BigUint::from(2u32),
        c_n,
    })
}
