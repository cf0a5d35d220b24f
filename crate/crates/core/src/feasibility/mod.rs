//! Exact strict feasibility of homogeneous systems `w · a > 0`.
//!
//! By homogeneity the strict system is feasible iff `W a >= 1` is. Two exact
//! Phase-1 formulations decide it:
//!
//! * [`Route::Alternative`] (default) works on the theorem-of-the-alternative
//!   side: `W a > 0` is infeasible iff some `y >= 0` with `sum(y) = 1` has
//!   `W^T y = 0`. Phase 1 on that system has only `dim + 1` rows; when its
//!   optimum is positive, the simplex multipliers give `a` with `W a >= t > 0`.
//! * [`Route::Primal`] runs Phase 1 directly on `W a⁺ - W a⁻ - s = 1` with
//!   free variables split into nonnegative parts.
//!
//! Both routes return a certificate for either verdict (a witness `a`, or a
//! nonnegative combination of rows summing to zero), and the certificate is
//! re-checked in exact integer arithmetic before a verdict is returned.

mod tableau;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::configurations::ConstraintSystem;
use crate::error::{invalid, Error, Result};
use crate::serde_ext;
use tableau::{phase_one, DenseMatrix, Overflow, PivotInt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    #[default]
    Alternative,
    Primal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    /// Present iff feasible; satisfies every row strictly.
    #[serde(with = "serde_ext::rational_vec_opt")]
    pub witness: Option<Vec<BigRational>>,
    pub pivots: usize,
    /// Whether the run had to fall back from machine integers to arbitrary
    /// precision.
    pub bigint_fallback: bool,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

/// Raw integer outcome: either `a = numer / denom` or a certificate `y`.
enum Certificate<T> {
    Witness { numer: Vec<T>, denom: T },
    Combination(Vec<T>),
}

struct Solved<T> {
    certificate: Certificate<T>,
    pivots: usize,
}

fn dense_rows(system: &ConstraintSystem) -> Vec<&[i8]> {
    system.rows().iter().map(|r| r.coeffs.as_slice()).collect()
}

fn solve_alternative<T: PivotInt>(rows: &[&[i8]], dim: usize) -> Result<Solved<T>, Overflow> {
    let m = rows.len();
    let mut a = DenseMatrix::zeros(dim + 1, m);
    for (i, row) in rows.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            if c != 0 {
                a.set(k, i, c);
            }
        }
        a.set(dim, i, 1);
    }
    let mut b = vec![0i64; dim + 1];
    b[dim] = 1;
    let out = phase_one::<T>(&a, &b, true)?;
    let certificate = if out.value.is_zero() {
        Certificate::Combination(out.primal)
    } else {
        // a = -v where (v, t) are the multipliers of the first `dim` rows.
        let numer = out.dual[..dim]
            .iter()
            .map(|u| T::zero().sub(u))
            .collect::<Result<Vec<T>, Overflow>>()?;
        Certificate::Witness { numer, denom: out.det }
    };
    Ok(Solved { certificate, pivots: out.pivots })
}

fn solve_primal<T: PivotInt>(rows: &[&[i8]], dim: usize) -> Result<Solved<T>, Overflow> {
    let m = rows.len();
    let mut a = DenseMatrix::zeros(m, 2 * dim + m);
    for (i, row) in rows.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            if c != 0 {
                a.set(i, k, c);
                a.set(i, dim + k, -c);
            }
        }
        a.set(i, 2 * dim + i, -1);
    }
    let b = vec![1i64; m];
    let out = phase_one::<T>(&a, &b, true)?;
    let certificate = if out.value.is_zero() {
        let numer = (0..dim)
            .map(|k| out.primal[k].sub(&out.primal[dim + k]))
            .collect::<Result<Vec<T>, Overflow>>()?;
        Certificate::Witness { numer, denom: out.det }
    } else {
        Certificate::Combination(out.dual)
    };
    Ok(Solved { certificate, pivots: out.pivots })
}

/// Checks the certificate exactly. `Ok(false)` means it is wrong.
fn verify<T: PivotInt>(rows: &[&[i8]], dim: usize, cert: &Certificate<T>) -> Result<bool, Overflow> {
    match cert {
        Certificate::Witness { numer, denom } => {
            if !denom.is_positive() || numer.len() != dim {
                return Ok(false);
            }
            for row in rows {
                let mut dot = T::zero();
                for (c, v) in row.iter().zip(numer) {
                    dot = match c {
                        1 => dot.add(v)?,
                        -1 => dot.sub(v)?,
                        0 => dot,
                        _ => dot.add(&T::from_i64(*c as i64).mul(v)?)?,
                    };
                }
                if !dot.is_positive() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Certificate::Combination(y) => {
            if y.len() != rows.len() || y.iter().any(|v| v.is_negative()) || y.iter().all(|v| v.is_zero()) {
                return Ok(false);
            }
            for k in 0..dim {
                let mut s = T::zero();
                for (row, yi) in rows.iter().zip(y) {
                    s = match row[k] {
                        1 => s.add(yi)?,
                        -1 => s.sub(yi)?,
                        0 => s,
                        c => s.add(&T::from_i64(c as i64).mul(yi)?)?,
                    };
                }
                if !s.is_zero() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

fn solve_checked<T: PivotInt>(rows: &[&[i8]], dim: usize, route: Route) -> Result<Result<Solved<T>>, Overflow> {
    let solved = match route {
        Route::Alternative => solve_alternative::<T>(rows, dim)?,
        Route::Primal => solve_primal::<T>(rows, dim)?,
    };
    if !verify(rows, dim, &solved.certificate)? {
        return Ok(Err(Error::Internal(format!(
            "{route:?} simplex produced a certificate that fails exact verification"
        ))));
    }
    Ok(Ok(solved))
}

fn check_dimension(system: &ConstraintSystem, dim: usize) -> Result<()> {
    if system.dim() != dim || system.rows().iter().any(|r| r.coeffs.len() != dim) {
        return Err(invalid(format!("system dimension {} does not match n = {dim}", system.dim())));
    }
    Ok(())
}

/// Decides `∃ a ∈ Q^dim : w · a > 0` for all rows, with the default route.
pub fn strict_feasible(system: &ConstraintSystem, dim: usize) -> Result<FeasibilityResult> {
    strict_feasible_with(system, dim, Route::default())
}

pub fn strict_feasible_with(system: &ConstraintSystem, dim: usize, route: Route) -> Result<FeasibilityResult> {
    check_dimension(system, dim)?;
    if system.is_empty() {
        return Ok(FeasibilityResult {
            status: FeasibilityStatus::Feasible,
            witness: Some(vec![BigRational::from_integer(0.into()); dim]),
            pivots: 0,
            bigint_fallback: false,
        });
    }
    let rows = dense_rows(system);
    let (certificate, pivots, bigint_fallback) = solve_tiered(&rows, dim, route)?;
    Ok(match certificate {
        Certificate::Witness { numer, denom } => FeasibilityResult {
            status: FeasibilityStatus::Feasible,
            witness: Some(numer.into_iter().map(|v| BigRational::new(v, denom.clone())).collect()),
            pivots,
            bigint_fallback,
        },
        Certificate::Combination(_) => FeasibilityResult {
            status: FeasibilityStatus::Infeasible,
            witness: None,
            pivots,
            bigint_fallback,
        },
    })
}

/// Runs in `i64`, then `i128`, then arbitrary precision, moving up a tier
/// whenever an intermediate overflows. The flag reports the last tier.
fn solve_tiered(rows: &[&[i8]], dim: usize, route: Route) -> Result<(Certificate<BigInt>, usize, bool)> {
    if let Ok(solved) = solve_checked::<i64>(rows, dim, route) {
        let s = solved?;
        return Ok((to_big(s.certificate), s.pivots, false));
    }
    if let Ok(solved) = solve_checked::<i128>(rows, dim, route) {
        let s = solved?;
        return Ok((to_big(s.certificate), s.pivots, false));
    }
    let s = solve_checked::<BigInt>(rows, dim, route).expect("arbitrary precision cannot overflow")?;
    Ok((s.certificate, s.pivots, true))
}

/// Verdict only; skips building rational witnesses. Used on hot paths.
pub(crate) fn rows_strictly_feasible(rows: &[&[i8]], dim: usize) -> Result<bool> {
    fn feasible<T>(solved: Solved<T>) -> bool {
        matches!(solved.certificate, Certificate::Witness { .. })
    }
    if rows.is_empty() {
        return Ok(true);
    }
    let route = Route::Alternative;
    if let Ok(solved) = solve_checked::<i64>(rows, dim, route) {
        return Ok(feasible(solved?));
    }
    if let Ok(solved) = solve_checked::<i128>(rows, dim, route) {
        return Ok(feasible(solved?));
    }
    Ok(feasible(solve_checked::<BigInt>(rows, dim, route).expect("arbitrary precision cannot overflow")?))
}

fn to_big<T: Into<BigInt>>(cert: Certificate<T>) -> Certificate<BigInt> {
    match cert {
        Certificate::Witness { numer, denom } => Certificate::Witness {
            numer: numer.into_iter().map(Into::into).collect(),
            denom: denom.into(),
        },
        Certificate::Combination(y) => Certificate::Combination(y.into_iter().map(Into::into).collect()),
    }
}
