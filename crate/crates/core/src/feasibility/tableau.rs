//! Integer-preserving Phase-1 simplex.
//!
//! Every tableau entry is kept as an integer equal to the true (rational)
//! entry times the determinant of the current basis. A pivot on `(p, q)`
//! rewrites each row `r != p` as `(T[p][q] * T[r] - T[r][q] * T[p]) / det`,
//! where the division is always exact. Entering and leaving variables follow
//! the least-index rule, which cannot cycle.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

/// Integer arithmetic the tableau needs. Every operation may report overflow;
/// the arbitrary-precision implementation never does.
pub(crate) trait PivotInt: Clone + Debug + Ord + Sized {
    fn from_i64(v: i64) -> Self;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn add(&self, other: &Self) -> Result<Self, Overflow>;
    fn sub(&self, other: &Self) -> Result<Self, Overflow>;
    fn mul(&self, other: &Self) -> Result<Self, Overflow>;
    /// `(a * b - c * d) / e`, where the division is known to be exact.
    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, e: &Self) -> Result<Self, Overflow>;
}

macro_rules! machine_pivot_int {
    ($t:ty) => {
        impl PivotInt for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn zero() -> Self {
                0
            }
            fn is_zero(&self) -> bool {
                *self == 0
            }
            fn is_positive(&self) -> bool {
                *self > 0
            }
            fn is_negative(&self) -> bool {
                *self < 0
            }
            fn add(&self, other: &Self) -> Result<Self, Overflow> {
                self.checked_add(*other).ok_or(Overflow)
            }
            fn sub(&self, other: &Self) -> Result<Self, Overflow> {
                self.checked_sub(*other).ok_or(Overflow)
            }
            fn mul(&self, other: &Self) -> Result<Self, Overflow> {
                self.checked_mul(*other).ok_or(Overflow)
            }
            #[inline]
            fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, e: &Self) -> Result<Self, Overflow> {
                let ab = a.checked_mul(*b).ok_or(Overflow)?;
                let num = if *c == 0 || *d == 0 {
                    ab
                } else {
                    ab.checked_sub(c.checked_mul(*d).ok_or(Overflow)?).ok_or(Overflow)?
                };
                if *e == 1 { Ok(num) } else { num.checked_div(*e).ok_or(Overflow) }
            }
        }
    };
}

machine_pivot_int!(i64);
machine_pivot_int!(i128);

impl PivotInt for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self + other)
    }
    fn sub(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self - other)
    }
    fn mul(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self * other)
    }
    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, e: &Self) -> Result<Self, Overflow> {
        let mut num = a * b;
        if !Zero::is_zero(c) && !Zero::is_zero(d) {
            num -= c * d;
        }
        if e.is_one() {
            Ok(num)
        } else {
            Ok(num / e)
        }
    }
}

/// Optimal Phase-1 basis of `min sum(artificials)` subject to `A x + art = b`,
/// `x, art >= 0`, with `b >= 0`. All vectors are numerators over `det`.
#[derive(Debug, Clone)]
pub(crate) struct Phase1<T> {
    /// Optimal objective value times `det`.
    pub value: T,
    pub det: T,
    /// Structural part of the optimal basic solution.
    pub primal: Vec<T>,
    /// Simplex multipliers `c_B B^-1`, one per row.
    pub dual: Vec<T>,
    pub pivots: usize,
}

/// Dense constraint matrix with small integer entries, row-major.
#[derive(Debug, Clone)]
pub(crate) struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i8>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i8) {
        self.data[r * self.cols + c] = v;
    }
}

/// Runs Phase 1 to optimality. When `stop_at_zero` is set, returns as soon as
/// the objective reaches zero (a feasible point of `A x = b` is then known and
/// the multipliers are not meaningful).
pub(crate) fn phase_one<T: PivotInt>(
    a: &DenseMatrix,
    b: &[i64],
    stop_at_zero: bool,
) -> Result<Phase1<T>, Overflow> {
    let m = a.rows;
    let n = a.cols;
    debug_assert_eq!(b.len(), m);
    debug_assert!(b.iter().all(|&v| v >= 0));

    let width = n + m + 1;
    let rhs = n + m;
    let mut tab: Vec<T> = vec![T::zero(); (m + 1) * width];
    let obj = m * width;
    let mut obj_rhs: i64 = 0;
    for r in 0..m {
        let row = r * width;
        for c in 0..n {
            let v = a.get(r, c);
            if v != 0 {
                tab[row + c] = T::from_i64(v as i64);
            }
        }
        tab[row + n + r] = T::from_i64(1);
        tab[row + rhs] = T::from_i64(b[r]);
        obj_rhs -= b[r];
    }
    for c in 0..n {
        let s: i64 = (0..m).map(|r| a.get(r, c) as i64).sum();
        if s != 0 {
            tab[obj + c] = T::from_i64(-s);
        }
    }
    tab[obj + rhs] = T::from_i64(obj_rhs);

    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut det = T::from_i64(1);
    let mut pivots = 0usize;
    let mut saved_pivot_row: Vec<T> = Vec::with_capacity(width);

    loop {
        if stop_at_zero && tab[obj + rhs].is_zero() {
            break;
        }
        // Artificial columns never re-enter; the restricted problem has the
        // same optimal value because every structural column stays available.
        let Some(q) = (0..n).find(|&c| tab[obj + c].is_negative()) else {
            break;
        };

        let mut leave: Option<usize> = None;
        for r in 0..m {
            let coef = &tab[r * width + q];
            if !coef.is_positive() {
                continue;
            }
            leave = Some(match leave {
                None => r,
                Some(best) => {
                    // Compare rhs_r / coef_r against rhs_best / coef_best.
                    let lhs = tab[r * width + rhs].mul(&tab[best * width + q])?;
                    let rhs_v = tab[best * width + rhs].mul(coef)?;
                    match lhs.cmp(&rhs_v) {
                        Ordering::Less => r,
                        Ordering::Greater => best,
                        Ordering::Equal => {
                            if basis[r] < basis[best] {
                                r
                            } else {
                                best
                            }
                        }
                    }
                }
            });
        }
        let p = leave.expect("phase-1 objective is bounded below");

        saved_pivot_row.clear();
        saved_pivot_row.extend_from_slice(&tab[p * width..(p + 1) * width]);
        let piv = saved_pivot_row[q].clone();
        for r in 0..=m {
            if r == p {
                continue;
            }
            let row = r * width;
            let factor = tab[row + q].clone();
            for c in 0..width {
                let cur = &tab[row + c];
                if factor.is_zero() && cur.is_zero() {
                    continue;
                }
                tab[row + c] = T::cross_div(&piv, cur, &factor, &saved_pivot_row[c], &det)?;
            }
        }
        det = piv;
        basis[p] = q;
        pivots += 1;
    }

    let mut primal = vec![T::zero(); n];
    for (r, &var) in basis.iter().enumerate() {
        if var < n {
            primal[var] = tab[r * width + rhs].clone();
        }
    }
    let dual = (0..m)
        .map(|r| det.sub(&tab[obj + n + r]))
        .collect::<Result<Vec<T>, Overflow>>()?;
    let value = T::zero().sub(&tab[obj + rhs])?;
    Ok(Phase1 { value, det, primal, dual, pivots })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[i8]]) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(rows.len(), rows[0].len());
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, v);
            }
        }
        m
    }

    #[test]
    fn feasible_equality_system_reaches_zero() {
        // x0 + x1 = 2, x1 = 1
        let a = matrix(&[&[1, 1], &[0, 1]]);
        let out = phase_one::<i128>(&a, &[2, 1], false).unwrap();
        assert_eq!(out.value, 0);
        assert_eq!(out.primal[0], out.det);
        assert_eq!(out.primal[1], out.det);
    }

    #[test]
    fn infeasible_system_has_positive_value_and_dual_certificate() {
        // x0 - x1 = 1 and -x0 + x1 = 1 cannot both hold.
        let a = matrix(&[&[1, -1], &[-1, 1]]);
        let out = phase_one::<i128>(&a, &[1, 1], false).unwrap();
        assert!(out.value > 0);
        // Dual feasibility: A^T u <= 0 on structural columns, b^T u = value.
        for c in 0..2 {
            let s: i128 = (0..2).map(|r| a.get(r, c) as i128 * out.dual[r]).sum();
            assert!(s <= 0);
        }
        assert_eq!(out.dual[0] + out.dual[1], out.value);
    }

    #[test]
    fn bigint_and_i128_agree() {
        let a = matrix(&[&[1, -1, 0, 1], &[0, 1, -1, 1], &[1, 0, 1, -1]]);
        let b = [1, 2, 0];
        let small = phase_one::<i128>(&a, &b, false).unwrap();
        let big = phase_one::<BigInt>(&a, &b, false).unwrap();
        assert_eq!(BigInt::from(small.value), big.value);
        assert_eq!(BigInt::from(small.det), big.det);
        assert_eq!(small.pivots, big.pivots);
    }
}
