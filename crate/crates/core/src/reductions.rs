//! Linear reductions between (min,+)-convolution and MCSP, each with its
//! decoder, plus a seeded harness that checks both round trips against the
//! naive kernels.
//!
//! Convolution inputs are 0-based (`x_0..x_n`); the MCSP sequences built and
//! decoded here are 1-based (`a_1..a_N`).

use std::time::Instant;

use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::kernels::{abs_sum, mcsp_naive, minplus_conv, ConvolutionResult, Sequence, SubsumProfile};
use crate::serde_ext;

/// MCSP input of length `2n + 4` encoding a convolution of arity `n`.
///
/// Layout (1-based): `a_1..a_n` are the reversed differences of `X`,
/// `a_{n+1} = a_{n+4} = S`, `a_{n+2} = -x_0`, `a_{n+3} = -y_0`, and
/// `a_{n+5}..a_{2n+4}` are the differences of `Y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvToMcspInstance {
    pub a: Sequence,
    #[serde(with = "serde_ext::rational")]
    pub big_constant: BigRational,
    pub n: usize,
}

/// Convolution pair whose (min,+) product encodes the MCSP maxima of a
/// length-`n` sequence: `x_i = P_{n-i}`, `y_j = -P_j` with prefix sums `P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McspToConvInstance {
    pub x: Sequence,
    pub y: Sequence,
    pub n: usize,
}

pub fn conv_to_mcsp(x: &Sequence, y: &Sequence) -> Result<ConvToMcspInstance> {
    if x.len() != y.len() {
        return Err(invalid(format!(
            "convolution inputs must have equal length, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() - 1;
    let (xs, ys) = (x.as_slice(), y.as_slice());
    let s = abs_sum(xs) + abs_sum(ys) + BigRational::one();

    let mut a = Vec::with_capacity(2 * n + 4);
    for i in 1..=n {
        a.push(&xs[n - i] - &xs[n + 1 - i]);
    }
    a.push(s.clone());
    a.push(-&xs[0]);
    a.push(-&ys[0]);
    a.push(s.clone());
    for i in n + 5..=2 * n + 4 {
        a.push(&ys[i - n - 5] - &ys[i - n - 4]);
    }
    Ok(ConvToMcspInstance { a: Sequence::new(a)?, big_constant: s, n })
}

/// `z_k = 2S - m_{k+4}` for `k = 0..2n`.
pub fn decode_conv(instance: &ConvToMcspInstance, profile: &SubsumProfile) -> Result<ConvolutionResult> {
    let n = instance.n;
    if profile.len() != 2 * n + 4 {
        return Err(invalid(format!(
            "profile has {} lengths, expected {}",
            profile.len(),
            2 * n + 4
        )));
    }
    let two_s = &instance.big_constant + &instance.big_constant;
    let z = (0..=2 * n).map(|k| &two_s - profile.maximum(k + 4)).collect();
    Ok(ConvolutionResult { z })
}

pub fn mcsp_to_conv(a: &Sequence) -> McspToConvInstance {
    let n = a.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(BigRational::from_integer(0.into()));
    for v in a.iter() {
        let next = prefix.last().unwrap() + v;
        prefix.push(next);
    }
    let x = (0..=n).map(|i| prefix[n - i].clone()).collect();
    let y = prefix.iter().map(|p| -p).collect();
    McspToConvInstance {
        x: Sequence::new(x).expect("n + 1 >= 1 values"),
        y: Sequence::new(y).expect("n + 1 >= 1 values"),
        n,
    }
}

/// `m_l = -z_{n+l}` for `l = 1..n`.
pub fn recover_maxima(instance: &McspToConvInstance, conv: &ConvolutionResult) -> Result<Vec<BigRational>> {
    let n = instance.n;
    if conv.z.len() != 2 * n + 1 {
        return Err(invalid(format!("convolution has {} terms, expected {}", conv.z.len(), 2 * n + 1)));
    }
    Ok((1..=n).map(|l| -&conv.z[n + l]).collect())
}

/// Checks that the maximum window of every length `k + 4` covers both
/// big-constant cells at `n + 1` and `n + 4`.
pub fn covers_gadget_cells(instance: &ConvToMcspInstance, profile: &SubsumProfile) -> bool {
    let n = instance.n;
    (4..=2 * n + 4).all(|len| {
        let start = profile.position(len);
        start <= n + 1 && start + len - 1 >= n + 4
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    /// Arity `n` of the convolution instance (inputs of length `n + 1`).
    pub conv_arity: usize,
    /// Length of the MCSP instance.
    pub mcsp_len: usize,
    pub conv_to_mcsp_ok: bool,
    pub mcsp_to_conv_ok: bool,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.conv_to_mcsp_ok && self.mcsp_to_conv_ok
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub trials: Vec<TrialOutcome>,
    pub passed: usize,
    pub failed: usize,
    pub seed: u64,
    pub max_n: usize,
    pub elapsed_ms: u128,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Random rational with numerator in `-60..=60` and denominator in `1..=12`.
fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    let p: i64 = rng.gen_range(-60..=60);
    let q: i64 = rng.gen_range(1..=12);
    BigRational::new(p.into(), q.into())
}

fn random_sequence<R: Rng>(rng: &mut R, len: usize) -> Sequence {
    Sequence::new((0..len).map(|_| random_rational(rng)).collect()).expect("len >= 1")
}

/// Inputs of trial `trial`: `(X, Y, A)`. Reproducible from `(seed, trial)`.
pub fn trial_instances(seed: u64, trial: usize, max_n: usize) -> (Sequence, Sequence, Sequence) {
    let mut rng = trial_rng(seed, trial);
    let arity = rng.gen_range(0..=max_n);
    let x = random_sequence(&mut rng, arity + 1);
    let y = random_sequence(&mut rng, arity + 1);
    let len = rng.gen_range(1..=max_n.max(1));
    let a = random_sequence(&mut rng, len);
    (x, y, a)
}

fn run_trial(seed: u64, trial: usize, max_n: usize) -> TrialOutcome {
    let (x, y, a) = trial_instances(seed, trial, max_n);

    let conv_to_mcsp_ok = (|| -> Result<bool> {
        let expected = minplus_conv(&x, &y)?;
        let instance = conv_to_mcsp(&x, &y)?;
        let profile = mcsp_naive(&instance.a);
        Ok(decode_conv(&instance, &profile)? == expected && covers_gadget_cells(&instance, &profile))
    })()
    .unwrap_or(false);

    let mcsp_to_conv_ok = (|| -> Result<bool> {
        let expected = mcsp_naive(&a).maxima;
        let instance = mcsp_to_conv(&a);
        let conv = minplus_conv(&instance.x, &instance.y)?;
        Ok(recover_maxima(&instance, &conv)? == expected)
    })()
    .unwrap_or(false);

    TrialOutcome {
        trial,
        conv_arity: x.len() - 1,
        mcsp_len: a.len(),
        conv_to_mcsp_ok,
        mcsp_to_conv_ok,
    }
}

/// Runs `trials` seeded random instances through both reductions and compares
/// each decoded result bit-for-bit with the naive kernels.
pub fn verify_equivalence(trials: usize, max_n: usize, seed: u64) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let start = Instant::now();
    let outcomes: Vec<TrialOutcome> = (0..trials).into_par_iter().map(|t| run_trial(seed, t, max_n)).collect();
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    Ok(VerificationReport {
        failed: outcomes.len() - passed,
        passed,
        trials: outcomes,
        seed,
        max_n,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Sequence {
        Sequence::from_integers(v).unwrap()
    }

    fn rats(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    #[test]
    fn gadget_for_small_pair() {
        let inst = conv_to_mcsp(&ints(&[1, 2]), &ints(&[3, 4])).unwrap();
        assert_eq!(inst.n, 1);
        assert_eq!(inst.big_constant, BigRational::from_integer(11.into()));
        assert_eq!(inst.a, ints(&[-1, 11, -1, -3, 11, -1]));

        let profile = mcsp_naive(&inst.a);
        assert_eq!(profile.maxima[3..].to_vec(), rats(&[18, 17, 16]));
        assert_eq!(decode_conv(&inst, &profile).unwrap().z, rats(&[4, 5, 6]));
        assert!(covers_gadget_cells(&inst, &profile));
    }

    #[test]
    fn gadget_for_arity_zero() {
        let inst = conv_to_mcsp(&ints(&[0]), &ints(&[0])).unwrap();
        assert_eq!(inst.a, ints(&[1, 0, 0, 1]));
        let profile = mcsp_naive(&inst.a);
        assert_eq!(decode_conv(&inst, &profile).unwrap().z, rats(&[0]));
    }

    #[test]
    fn all_zero_inputs_decode_to_zero() {
        for n in 0..6 {
            let zeros = Sequence::from_integers(&vec![0; n + 1]).unwrap();
            let inst = conv_to_mcsp(&zeros, &zeros).unwrap();
            assert_eq!(inst.a.len(), 2 * n + 4);
            let z = decode_conv(&inst, &mcsp_naive(&inst.a)).unwrap().z;
            assert_eq!(z, rats(&vec![0; 2 * n + 1]));
        }
    }

    #[test]
    fn decode_rejects_wrong_profile() {
        let inst = conv_to_mcsp(&ints(&[1, 2]), &ints(&[3, 4])).unwrap();
        let short = mcsp_naive(&ints(&[1, 2, 3]));
        assert!(decode_conv(&inst, &short).is_err());
        assert!(conv_to_mcsp(&ints(&[1]), &ints(&[1, 2])).is_err());
    }

    #[test]
    fn prefix_sum_reduction_small() {
        let inst = mcsp_to_conv(&ints(&[1, 2]));
        assert_eq!(inst.x, ints(&[3, 1, 0]));
        assert_eq!(inst.y, ints(&[0, -1, -3]));
        let conv = minplus_conv(&inst.x, &inst.y).unwrap();
        assert_eq!(conv.z[3], BigRational::from_integer((-2).into()));
        assert_eq!(conv.z[4], BigRational::from_integer((-3).into()));
        assert_eq!(recover_maxima(&inst, &conv).unwrap(), rats(&[2, 3]));
    }

    #[test]
    fn prefix_sum_reduction_recovers_example() {
        let a = ints(&[3, 0, 5, 0, 2, 4]);
        let inst = mcsp_to_conv(&a);
        let conv = minplus_conv(&inst.x, &inst.y).unwrap();
        assert_eq!(recover_maxima(&inst, &conv).unwrap(), rats(&[5, 6, 8, 11, 11, 14]));
        let zeros = ints(&[0; 5]);
        let inst = mcsp_to_conv(&zeros);
        let conv = minplus_conv(&inst.x, &inst.y).unwrap();
        assert_eq!(recover_maxima(&inst, &conv).unwrap(), rats(&[0; 5]));
    }

    #[test]
    fn harness_rejects_zero_trials() {
        assert!(verify_equivalence(0, 10, 1).is_err());
    }

    #[test]
    fn harness_is_deterministic() {
        let a = verify_equivalence(25, 12, 99).unwrap();
        let b = verify_equivalence(25, 12, 99).unwrap();
        assert_eq!(a.trials, b.trials);
        assert!(a.all_passed());
    }
}
