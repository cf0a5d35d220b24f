//! An explicit family of `2^(n-3)` distinct unique configurations, one per
//! subset `S ⊆ {4, …, n}`.
//!
//! `a_3 = 4n` dominates everything else, so every maximum window covers
//! index 3. For a length `k ≤ n-2` the window may start at 2 or 3; the
//! difference of the two sums is `a_2 - a_{k+2} = 2 - a_{k+2}`, which is
//! positive exactly when `k+2 ∈ S`, and `±1` once `k ≥ 2`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configurations::{is_unique, output_configurations, Configuration};
use crate::error::{invalid, Result};
use crate::kernels::Sequence;

pub const MIN_N: usize = 5;
pub const MAX_VERIFY_N: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyInstance {
    pub n: usize,
    pub subset: Vec<usize>,
    pub sequence: Sequence,
    pub configuration: Configuration,
}

impl FamilyInstance {
    fn contains(&self, i: usize) -> bool {
        self.subset.binary_search(&i).is_ok()
    }
}

pub fn gen_instance(n: usize, subset: &[usize]) -> Result<FamilyInstance> {
    if n < MIN_N {
        return Err(invalid(format!("the family needs n >= {MIN_N}, got {n}")));
    }
    if let Some(bad) = subset.iter().find(|&&i| i < 4 || i > n) {
        return Err(invalid(format!("subset element {bad} outside 4..={n}")));
    }
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();
    let member = |i: usize| subset.binary_search(&i).is_ok();

    let mut a = vec![0i64, 2, 4 * n as i64];
    a.extend((4..=n).map(|i| if member(i) { 1 } else { 3 }));
    let mut p: Vec<usize> = (1..=n - 2).map(|j| if member(j + 2) { 2 } else { 3 }).collect();
    p.extend([2, 1]);

    Ok(FamilyInstance {
        n,
        sequence: Sequence::from_integers(&a)?,
        configuration: Configuration::new(p)?,
        subset,
    })
}

/// The subset encoded by `mask`: bit `b` stands for element `4 + b`.
pub fn subset_from_mask(n: usize, mask: u64) -> Vec<usize> {
    (4..=n).filter(|&i| mask >> (i - 4) & 1 == 1).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceCheck {
    pub subset: Vec<usize>,
    pub configuration: Configuration,
    /// The output configurations of the sequence are exactly `{P}`.
    pub exact_configuration: bool,
    /// The LP accepts `P` and its witness reproduces exactly `{P}`.
    pub lp_unique: bool,
    pub witness_round_trip: bool,
    /// Every `Δ_k` has the sign the subset dictates.
    pub delta_signs: bool,
    /// `a_3` exceeds the sum of all other entries.
    pub dominance: bool,
}

impl InstanceCheck {
    pub fn passed(&self) -> bool {
        self.exact_configuration && self.lp_unique && self.witness_round_trip && self.delta_signs && self.dominance
    }
}

pub fn check_instance(inst: &FamilyInstance) -> Result<InstanceCheck> {
    let n = inst.n;
    let a = &inst.sequence;
    let exact_configuration = output_configurations(a)? == vec![inst.configuration.clone()];

    let verdict = is_unique(&inst.configuration)?;
    let witness_round_trip = match verdict.witness_sequence() {
        Some(w) => output_configurations(&w)? == vec![inst.configuration.clone()],
        None => false,
    };

    let one = BigRational::from_integer(BigInt::from(1));
    let two = BigRational::from_integer(BigInt::from(2));
    let delta_signs = (1..=n - 2).all(|k| {
        let delta = a.window_sum(2, k) - a.window_sum(3, k);
        let identity = delta == &two - &a.as_slice()[k + 1];
        let sign = delta.is_positive() == inst.contains(k + 2);
        identity && sign && (k == 1 || delta.abs() == one)
    });

    let total: BigRational = a.iter().sum();
    let a3 = &a.as_slice()[2];
    let dominance = a3 > &(&total - a3);

    Ok(InstanceCheck {
        subset: inst.subset.clone(),
        configuration: inst.configuration.clone(),
        exact_configuration,
        lp_unique: verdict.unique,
        witness_round_trip,
        delta_signs,
        dominance,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub n: usize,
    pub instances: usize,
    pub passed: usize,
    pub distinct_configurations: usize,
    pub failures: Vec<InstanceCheck>,
}

impl FamilyReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.passed == self.instances && self.distinct_configurations == self.instances
    }
}

/// Generates and checks the instance of every subset of `{4, …, n}`.
pub fn verify_family(n: usize) -> Result<FamilyReport> {
    if n < MIN_N || n > MAX_VERIFY_N {
        return Err(invalid(format!("verification supports {MIN_N} <= n <= {MAX_VERIFY_N}, got {n}")));
    }
    let count = 1u64 << (n - 3);
    let checks = (0..count)
        .into_par_iter()
        .map(|mask| check_instance(&gen_instance(n, &subset_from_mask(n, mask))?))
        .collect::<Result<Vec<_>>>()?;
    let distinct: HashSet<&Configuration> = checks.iter().map(|c| &c.configuration).collect();
    let passed = checks.iter().filter(|c| c.passed()).count();
    let distinct_configurations = distinct.len();
    Ok(FamilyReport {
        n,
        instances: checks.len(),
        passed,
        distinct_configurations,
        failures: checks.into_iter().filter(|c| !c.passed()).collect(),
    })
}
