//! Exact decimal renderings of rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

fn pow10(k: usize) -> BigInt {
    num_traits::pow(BigInt::from(10), k)
}

fn write_fixed(negative: bool, scaled: &BigInt, frac_digits: usize) -> String {
    let digits = scaled.abs().to_string();
    let digits = if digits.len() <= frac_digits {
        format!("{}{}", "0".repeat(frac_digits + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int_part, frac_part) = digits.split_at(digits.len() - frac_digits);
    let sign = if negative && !scaled.is_zero() { "-" } else { "" };
    if frac_digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// `value` cut (toward zero) to `frac_digits` decimals.
pub fn truncate(value: &BigRational, frac_digits: usize) -> String {
    let scaled = (value.numer() * pow10(frac_digits)) / value.denom();
    write_fixed(value.is_negative(), &scaled, frac_digits)
}

/// `value` rounded half away from zero to `frac_digits` decimals.
pub fn round(value: &BigRational, frac_digits: usize) -> String {
    let num: BigInt = value.numer().abs() * pow10(frac_digits) * 2 + value.denom();
    let scaled = num.div_floor(&(value.denom() * 2));
    write_fixed(value.is_negative(), &scaled, frac_digits)
}

/// The `k` with `10^(k-1) <= |value| < 10^k`: the number of digits before the
/// point, or minus the count of zeros right after it when `|value| < 1`.
/// Uses only integer comparisons, so unreduced operands are fine.
fn magnitude(value: &BigRational) -> i64 {
    let n = value.numer().abs();
    let d = value.denom().abs();
    // |value| >= 10^k
    let at_least = |k: i64| {
        if k >= 0 {
            n >= &d * pow10(k as usize)
        } else {
            &n * pow10((-k) as usize) >= d
        }
    };
    let log2 = n.bits() as i64 - d.bits() as i64;
    let mut k = (log2 as f64 * std::f64::consts::LOG10_2).floor() as i64;
    while at_least(k) {
        k += 1;
    }
    while !at_least(k - 1) {
        k -= 1;
    }
    k
}

/// Rounds `value` to `sig` significant digits (half away from zero) and
/// prints it with at least `min_frac` decimals, padding with zeros. Integer
/// digits are never rounded away.
pub fn significant(value: &BigRational, sig: usize, min_frac: usize) -> String {
    if value.is_zero() {
        return write_fixed(false, &BigInt::zero(), min_frac);
    }
    let mag = magnitude(value);
    let frac_for_sig = (sig as i64 - mag).max(0) as usize;
    let mut rounded = round(value, frac_for_sig);
    // A carry can add a digit (e.g. 9.99 -> 10.0); the extra trailing digit is
    // always zero, so only padding is affected.
    if min_frac > frac_for_sig {
        if frac_for_sig == 0 {
            rounded.push('.');
        }
        rounded.push_str(&"0".repeat(min_frac - frac_for_sig));
    }
    rounded
}
