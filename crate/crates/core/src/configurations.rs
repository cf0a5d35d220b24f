//! Output configurations, their inequality systems, and the uniqueness test.
//!
//! A configuration `P = (p_1, ..., p_n)` assigns to every window length `l` a
//! 1-based start `p_l` in `1..=n-l+1`. It is *unique* when some input has `P`
//! as its only output configuration, which holds exactly when the strict
//! system `Q(P,1) ∪ ... ∪ Q(P,n-1)` is feasible.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::feasibility::{strict_feasible_with, FeasibilityStatus, Route};
use crate::kernels::{window_maximizers, Sequence};
use crate::serde_ext;

/// Upper bound on the number of configurations `output_configurations` will
/// enumerate.
pub const MAX_OUTPUT_CONFIGURATIONS: u128 = 1_000_000;

fn check_positions(n: usize, p: &[usize]) -> Result<()> {
    for (idx, &start) in p.iter().enumerate() {
        let len = idx + 1;
        if start < 1 || start > n - len + 1 {
            return Err(invalid(format!(
                "p_{len} = {start} is outside 1..={} for n = {n}",
                n - len + 1
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Configuration {
    p: Vec<usize>,
}

impl Configuration {
    pub fn new(p: Vec<usize>) -> Result<Self> {
        if p.is_empty() {
            return Err(invalid("configuration must be nonempty"));
        }
        check_positions(p.len(), &p)?;
        Ok(Self { p })
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn positions(&self) -> &[usize] {
        &self.p
    }

    /// `p_len`, 1-based.
    pub fn position(&self, len: usize) -> usize {
        self.p[len - 1]
    }

    pub fn nonadjacency_violations(&self) -> Vec<(usize, usize)> {
        nonadjacency_violations(&self.p)
    }

    /// Every configuration of size `n`, in lexicographic order (`n!` items).
    pub fn all(n: usize) -> impl Iterator<Item = Configuration> {
        let mut next = if n == 0 { None } else { Some(vec![1usize; n]) };
        std::iter::from_fn(move || {
            let current = next.take()?;
            let mut succ = current.clone();
            let mut idx = n;
            while idx > 0 {
                idx -= 1;
                if succ[idx] < n - idx {
                    succ[idx] += 1;
                    for v in succ.iter_mut().skip(idx + 1) {
                        *v = 1;
                    }
                    next = Some(succ);
                    break;
                }
            }
            Some(Configuration { p: current })
        })
    }
}

impl TryFrom<Vec<usize>> for Configuration {
    type Error = Error;

    fn try_from(p: Vec<usize>) -> Result<Self> {
        Self::new(p)
    }
}

impl From<Configuration> for Vec<usize> {
    fn from(c: Configuration) -> Self {
        c.p
    }
}

impl FromStr for Configuration {
    type Err = Error;

    /// Comma-separated 1-based starts, e.g. `"2,4,2,1,2,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let p = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| invalid(format!("bad position {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.p.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Starts fixed for lengths `1..i-1`; `i` is the frontier.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialConfiguration {
    n: usize,
    fixed: Vec<usize>,
}

impl PartialConfiguration {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        Ok(Self { n, fixed: Vec::with_capacity(n) })
    }

    pub fn new(n: usize, fixed: Vec<usize>) -> Result<Self> {
        if n == 0 || fixed.len() > n {
            return Err(invalid(format!("prefix of length {} does not fit n = {n}", fixed.len())));
        }
        check_positions(n, &fixed)?;
        Ok(Self { n, fixed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fixed(&self) -> &[usize] {
        &self.fixed
    }

    /// The next length to fix.
    pub fn frontier(&self) -> usize {
        self.fixed.len() + 1
    }

    pub fn is_complete(&self) -> bool {
        self.fixed.len() == self.n
    }

    pub fn push(&mut self, start: usize) -> Result<()> {
        let len = self.frontier();
        if len > self.n || start < 1 || start > self.n - len + 1 {
            return Err(invalid(format!("cannot set p_{len} = {start} for n = {}", self.n)));
        }
        self.fixed.push(start);
        Ok(())
    }

    pub fn pop(&mut self) -> Option<usize> {
        self.fixed.pop()
    }

    pub fn nonadjacency_violations(&self) -> Vec<(usize, usize)> {
        nonadjacency_violations(&self.fixed)
    }

    pub fn to_configuration(&self) -> Option<Configuration> {
        self.is_complete().then(|| Configuration { p: self.fixed.clone() })
    }
}

impl From<&Configuration> for PartialConfiguration {
    fn from(c: &Configuration) -> Self {
        Self { n: c.n(), fixed: c.p.clone() }
    }
}

/// All ordered pairs `(i, j)` of fixed lengths with `p_j = p_i + i`, i.e. the
/// maximum window of length `j` starts right after the one of length `i`.
pub fn nonadjacency_violations(p: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (ii, &pi) in p.iter().enumerate() {
        for (jj, &pj) in p.iter().enumerate() {
            if ii != jj && pj == pi + ii + 1 {
                out.push((ii + 1, jj + 1));
            }
        }
    }
    out
}

/// One strict inequality `coeffs · a > 0`: the window of length `length` at
/// the configured start beats the one starting at `challenger`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<i8>,
    pub length: usize,
    pub challenger: usize,
}

/// Homogeneous strict linear inequalities over `dim` variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSystem {
    dim: usize,
    rows: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new() }
    }

    /// Builds a system from raw coefficient rows; used for ad-hoc systems that
    /// do not come from a configuration.
    pub fn from_rows(dim: usize, rows: Vec<Vec<i8>>) -> Result<Self> {
        let mut system = Self::new(dim);
        for coeffs in rows {
            system.push(Constraint { coeffs, length: 0, challenger: 0 })?;
        }
        Ok(system)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, row: Constraint) -> Result<()> {
        if row.coeffs.len() != self.dim {
            return Err(invalid(format!(
                "row has {} coefficients, system dimension is {}",
                row.coeffs.len(),
                self.dim
            )));
        }
        if row.coeffs.iter().all(|&c| c == 0) {
            return Err(invalid("all-zero constraint row"));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn extend(&mut self, other: ConstraintSystem) -> Result<()> {
        for row in other.rows {
            self.push(row)?;
        }
        Ok(())
    }

    /// Exact check of `w · a > 0` for every row.
    pub fn is_satisfied_by(&self, a: &[BigRational]) -> bool {
        a.len() == self.dim
            && self.rows.iter().all(|row| {
                let dot: BigRational = row
                    .coeffs
                    .iter()
                    .zip(a)
                    .filter(|(c, _)| **c != 0)
                    .map(|(&c, v)| if c > 0 { v.clone() } else { -v })
                    .sum();
                dot > BigRational::from_integer(0.into())
            })
    }
}

/// The rows of `Q(P, len)` for a window of length `len` fixed at `start`.
/// They depend only on `(n, len, start)`.
pub(crate) fn length_constraints(n: usize, len: usize, start: usize) -> impl Iterator<Item = Constraint> {
    (1..=n + 1 - len).filter(move |&j| j != start).map(move |j| {
        let mut coeffs = vec![0i8; n];
        for c in &mut coeffs[start - 1..start - 1 + len] {
            *c += 1;
        }
        for c in &mut coeffs[j - 1..j - 1 + len] {
            *c -= 1;
        }
        Constraint { coeffs, length: len, challenger: j }
    })
}

/// `Q(P, i)`: the window of length `i` at `p_i` strictly beats each of the
/// other `n - i` windows of that length. Empty when `i = n`.
pub fn build_inequalities(p: &Configuration, i: usize) -> Result<ConstraintSystem> {
    let n = p.n();
    if i < 1 || i > n {
        return Err(invalid(format!("length {i} outside 1..={n}")));
    }
    let mut system = ConstraintSystem::new(n);
    system.rows.extend(length_constraints(n, i, p.position(i)));
    Ok(system)
}

/// `Q(P,1) ∪ ... ∪ Q(P,upto)` for the fixed prefix.
pub(crate) fn prefix_system(n: usize, prefix: &[usize]) -> ConstraintSystem {
    let mut system = ConstraintSystem::new(n);
    for (idx, &start) in prefix.iter().enumerate() {
        let len = idx + 1;
        if len < n {
            system.rows.extend(length_constraints(n, len, start));
        }
    }
    system
}

/// Every output configuration of `a`: the product of the per-length
/// maximizer sets, in lexicographic order.
pub fn output_configurations(a: &Sequence) -> Result<Vec<Configuration>> {
    let maximizers = window_maximizers(a);
    let total = maximizers
        .iter()
        .try_fold(1u128, |acc, set| acc.checked_mul(set.len() as u128))
        .filter(|&t| t <= MAX_OUTPUT_CONFIGURATIONS);
    if total.is_none() {
        return Err(Error::ResourceLimit(format!(
            "more than {MAX_OUTPUT_CONFIGURATIONS} output configurations"
        )));
    }

    let mut out = Vec::new();
    let mut idx = vec![0usize; maximizers.len()];
    loop {
        out.push(Configuration { p: idx.iter().zip(&maximizers).map(|(&i, set)| set[i]).collect() });
        let mut k = idx.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < maximizers[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonUniqueReason {
    Adjacency,
    InfeasibleLp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquenessVerdict {
    pub unique: bool,
    pub reason: Option<NonUniqueReason>,
    /// Adjacent pairs `(i, j)` with `p_j = p_i + i`, when that test fired.
    pub adjacent_pairs: Vec<(usize, usize)>,
    /// An input whose only output configuration is `P`.
    #[serde(with = "serde_ext::rational_vec_opt")]
    pub witness: Option<Vec<BigRational>>,
}

impl UniquenessVerdict {
    pub fn witness_sequence(&self) -> Option<Sequence> {
        self.witness.clone().and_then(|w| Sequence::new(w).ok())
    }
}

/// Decides whether `p` is a unique configuration. The adjacency test runs
/// first; only if it passes is the full strict system handed to the solver.
pub fn is_unique(p: &Configuration) -> Result<UniquenessVerdict> {
    is_unique_with(p, Route::default())
}

/// [`is_unique`] with an explicit LP formulation.
pub fn is_unique_with(p: &Configuration, route: Route) -> Result<UniquenessVerdict> {
    let adjacent = p.nonadjacency_violations();
    if !adjacent.is_empty() {
        return Ok(UniquenessVerdict {
            unique: false,
            reason: Some(NonUniqueReason::Adjacency),
            adjacent_pairs: adjacent,
            witness: None,
        });
    }
    let n = p.n();
    let system = prefix_system(n, p.positions());
    let result = strict_feasible_with(&system, n, route)?;
    Ok(match result.status {
        FeasibilityStatus::Feasible => UniquenessVerdict {
            unique: true,
            reason: None,
            adjacent_pairs: Vec::new(),
            witness: result.witness,
        },
        FeasibilityStatus::Infeasible => UniquenessVerdict {
            unique: false,
            reason: Some(NonUniqueReason::InfeasibleLp),
            adjacent_pairs: Vec::new(),
            witness: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(s: &str) -> Configuration {
        s.parse().unwrap()
    }

    #[test]
    fn configuration_domain_is_validated() {
        assert!(Configuration::new(vec![3, 2, 1]).is_ok());
        assert!(Configuration::new(vec![3, 3, 2]).is_err());
        assert!(Configuration::new(vec![4, 1, 1]).is_err());
        assert!(Configuration::new(vec![0]).is_err());
        assert!("1,x".parse::<Configuration>().is_err());
    }

    #[test]
    fn all_configurations_counts_factorial() {
        let counts: Vec<usize> = (1..=6).map(|n| Configuration::all(n).count()).collect();
        assert_eq!(counts, vec![1, 2, 6, 24, 120, 720]);
        let first: Vec<String> = Configuration::all(3).map(|c| c.to_string()).collect();
        assert_eq!(first, vec!["1,1,1", "1,2,1", "2,1,1", "2,2,1", "3,1,1", "3,2,1"]);
    }

    #[test]
    fn output_configurations_examples() {
        let a = Sequence::from_integers(&[3, 0, 5, 0, 2, 4]).unwrap();
        assert_eq!(output_configurations(&a).unwrap(), vec![cfg("3,5,1,3,2,1")]);
        let ones = Sequence::from_integers(&[1, 1, 1]).unwrap();
        assert_eq!(output_configurations(&ones).unwrap().len(), 6);
        let inc = Sequence::from_integers(&[1, 2]).unwrap();
        assert_eq!(output_configurations(&inc).unwrap(), vec![cfg("2,1")]);
    }

    #[test]
    fn output_configurations_guard() {
        let flat = Sequence::from_integers(&[0; 12]).unwrap();
        assert!(matches!(output_configurations(&flat), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn inequalities_for_two_elements() {
        let q = build_inequalities(&cfg("2,1"), 1).unwrap();
        assert_eq!(q.rows().len(), 1);
        assert_eq!(q.rows()[0].coeffs, vec![-1, 1]);
        assert_eq!(q.rows()[0].challenger, 1);
    }

    #[test]
    fn inequalities_overlap_cancels() {
        let q = build_inequalities(&cfg("1,1,1"), 2).unwrap();
        assert_eq!(q.rows().len(), 1);
        assert_eq!(q.rows()[0].coeffs, vec![1, 0, -1]);
    }

    #[test]
    fn inequalities_row_counts_and_range() {
        let p = cfg("2,4,2,1,2,1");
        for i in 1..=6 {
            assert_eq!(build_inequalities(&p, i).unwrap().len(), 6 - i);
        }
        assert!(build_inequalities(&p, 0).is_err());
        assert!(build_inequalities(&p, 7).is_err());
    }

    #[test]
    fn nonadjacency_examples() {
        // Outside the configuration domain (p_4 = 4 > 2), but the pair test
        // only looks at the positions.
        assert!(nonadjacency_violations(&[5, 1, 3, 4, 1]).contains(&(2, 3)));
        assert!(cfg("2,4,2,1,2,1").nonadjacency_violations().is_empty());
        assert!(cfg("1,1").nonadjacency_violations().is_empty());
        assert_eq!(nonadjacency_violations(&[1, 2]), vec![(1, 2)]);
    }

    #[test]
    fn uniqueness_examples() {
        let v = is_unique(&cfg("1,2,1")).unwrap();
        assert!(!v.unique);
        assert_eq!(v.reason, Some(NonUniqueReason::Adjacency));

        let v = is_unique(&cfg("2,4,2,1,2,1")).unwrap();
        assert!(!v.unique);
        assert_eq!(v.reason, Some(NonUniqueReason::InfeasibleLp));
        assert!(v.adjacent_pairs.is_empty());

        let p = cfg("5,5,1,3,2,1");
        let v = is_unique(&p).unwrap();
        assert!(v.unique);
        let witness = v.witness_sequence().unwrap();
        assert_eq!(output_configurations(&witness).unwrap(), vec![p]);
    }

    #[test]
    fn single_element_is_unique() {
        let p = cfg("1");
        let v = is_unique(&p).unwrap();
        assert!(v.unique);
        assert_eq!(output_configurations(&v.witness_sequence().unwrap()).unwrap(), vec![p]);
    }

    #[test]
    fn constraint_system_rejects_bad_rows() {
        let mut s = ConstraintSystem::new(2);
        assert!(s.push(Constraint { coeffs: vec![0, 0], length: 1, challenger: 1 }).is_err());
        assert!(s.push(Constraint { coeffs: vec![1], length: 1, challenger: 1 }).is_err());
    }
}
