//! `Γ(n/2 + 1)`, the "(n/2)!" null bound, to arbitrary precision.
//!
//! For even `n` the value is the integer `(n/2)!`. For odd `n` it is
//! `n!! / 2^((n+1)/2) · √π`; `√π` is bracketed by integer arithmetic at
//! whatever precision a caller needs, so floors and truncations are exact.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::decimal;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Form {
    Integer(BigUint),
    /// `coefficient · √π`.
    SqrtPi(BigRational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfFactorial {
    n: u64,
    form: Form,
}

/// `Γ(n/2 + 1)`.
pub fn gamma_half_factorial(n: u64) -> HalfFactorial {
    let form = if n % 2 == 0 {
        Form::Integer((1..=n / 2).map(BigUint::from).product())
    } else {
        let double_fact: BigUint = (1..=n).step_by(2).map(BigUint::from).product();
        let pow2 = BigUint::one() << ((n + 1) / 2);
        Form::SqrtPi(BigRational::new(double_fact.into(), pow2.into()))
    };
    HalfFactorial { n, form }
}

fn pow10(k: usize) -> BigInt {
    num_traits::pow(BigInt::from(10), k)
}

/// `Σ (-1)^k scale / ((2k+1) x^(2k+1))` with floor divisions.
fn arctan_inv(x: u32, scale: &BigInt) -> BigInt {
    let x2 = BigInt::from(x) * x;
    let mut power = scale / x;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// Integer `v` with `v - 1 < π·10^p < v + 2`.
fn pi_scaled(p: usize) -> BigInt {
    const GUARD: usize = 12;
    let scale = pow10(p + GUARD);
    let approx: BigInt = arctan_inv(5, &scale) * 16 - arctan_inv(239, &scale) * 4;
    approx.div_floor(&pow10(GUARD))
}

/// `(lo, hi)` with `lo ≤ √π·10^p ≤ hi`.
fn sqrt_pi_bounds(p: usize) -> (BigInt, BigInt) {
    let v = pi_scaled(p);
    let scale = pow10(p);
    let lo = ((&v - 1u32) * &scale).sqrt();
    let hi = ((&v + 2u32) * &scale).sqrt() + 1u32;
    (lo, hi)
}

impl HalfFactorial {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.form, Form::Integer(_))
    }

    pub fn as_integer(&self) -> Option<&BigUint> {
        match &self.form {
            Form::Integer(v) => Some(v),
            Form::SqrtPi(_) => None,
        }
    }

    /// Rational enclosure `[lo, hi]` of the value, `hi - lo` roughly `10^-p`
    /// relative to the coefficient.
    pub fn bounds(&self, p: usize) -> (BigRational, BigRational) {
        match &self.form {
            Form::Integer(v) => {
                let r = BigRational::from_integer(BigInt::from(v.clone()));
                (r.clone(), r)
            }
            Form::SqrtPi(coef) => {
                let (lo, hi) = sqrt_pi_bounds(p);
                let den = pow10(p);
                (coef * BigRational::new(lo, den.clone()), coef * BigRational::new(hi, den))
            }
        }
    }

    /// Finds a precision at which `f` gives the same answer on both ends of
    /// the enclosure.
    fn settle<T: PartialEq>(&self, start: usize, f: impl Fn(&BigRational) -> T) -> T {
        let mut p = start.max(20);
        loop {
            let (lo, hi) = self.bounds(p);
            let (a, b) = (f(&lo), f(&hi));
            if a == b {
                return a;
            }
            p *= 2;
        }
    }

    /// `⌊x / Γ(n/2+1)⌋`, exactly.
    pub fn floor_quotient(&self, x: &BigUint) -> BigUint {
        if x.is_zero() {
            return BigUint::zero();
        }
        if let Form::Integer(v) = &self.form {
            return x / v;
        }
        let x = BigRational::from_integer(BigInt::from(x.clone()));
        let digits = x.numer().to_string().len() + 30;
        let q = self.settle(digits, |g| (&x / g).floor().to_integer());
        q.to_biguint().expect("nonnegative quotient")
    }

    /// The value cut to `frac_digits` decimals.
    pub fn truncated(&self, frac_digits: usize) -> String {
        self.settle(frac_digits + 10, |g| decimal::truncate(g, frac_digits))
    }

    /// The value rounded half away from zero to `frac_digits` decimals.
    pub fn rounded(&self, frac_digits: usize) -> String {
        self.settle(frac_digits + 10, |g| decimal::round(g, frac_digits))
    }

    /// The value to `sig` significant digits, rounded.
    pub fn significant(&self, sig: usize) -> String {
        self.settle(sig + 10, |g| decimal::significant(g, sig, 0))
    }

    /// `count / Γ(n/2+1)` cut to `frac_digits` decimals.
    pub fn ratio_truncated(&self, count: &BigUint, frac_digits: usize) -> String {
        let c = BigRational::from_integer(BigInt::from(count.clone()));
        let digits = frac_digits + c.numer().to_string().len() + 10;
        self.settle(digits, |g| decimal::truncate(&(&c / g), frac_digits))
    }

    pub fn to_f64(&self) -> f64 {
        match &self.form {
            Form::Integer(v) => v.to_f64().unwrap_or(f64::INFINITY),
            Form::SqrtPi(c) => c.to_f64().unwrap_or(f64::INFINITY) * std::f64::consts::PI.sqrt(),
        }
    }
}

impl fmt::Display for HalfFactorial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.truncated(1))
    }
}
