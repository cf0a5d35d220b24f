//! Naive exact solvers for the maximum consecutive subsums problem (MCSP) and
//! for (min,+)/(max,+) convolution.
//!
//! Index conventions: MCSP positions and window lengths are 1-based
//! (`a_1..a_n`), convolution inputs are 0-based (`x_0..x_n`). Both are stored
//! in ordinary 0-based `Vec`s; the conversion happens only in the accessors.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::serde_ext;

/// A nonempty finite list of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sequence {
    #[serde(with = "serde_ext::rational_vec")]
    values: Vec<BigRational>,
}

impl Sequence {
    pub fn new(values: Vec<BigRational>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("sequence must be nonempty"));
        }
        Ok(Self { values })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[BigRational] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<BigRational> {
        self.values
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigRational> {
        self.values.iter()
    }

    pub fn negated(&self) -> Self {
        Self { values: self.values.iter().map(|v| -v).collect() }
    }

    /// Sum of the `len` elements starting at 1-based position `start`.
    pub fn window_sum(&self, start: usize, len: usize) -> BigRational {
        assert!(start >= 1 && len >= 1 && start + len - 1 <= self.len(), "window out of range");
        self.values[start - 1..start - 1 + len].iter().sum()
    }

    /// Parses the line-oriented text format: one rational per line, written
    /// as `p/q`, an integer, or a finite decimal. Blank lines and `#` comments
    /// are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let value = parse_rational(line).ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("not a rational number: {line:?}"),
            })?;
            values.push(value);
        }
        if values.is_empty() {
            return Err(Error::Parse { line: 0, message: "no values in input".into() });
        }
        Self::new(values)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.values {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `-0.25`, exactly.
pub fn parse_rational(token: &str) -> Option<BigRational> {
    let token = token.trim();
    if token.contains('/') {
        return serde_ext::parse_exact_rational(token);
    }
    let (negative, body) = match token.as_bytes().first()? {
        b'-' => (true, &token[1..]),
        b'+' => (false, &token[1..]),
        _ => (false, token),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(numer, denom);
    Some(if negative { -value } else { value })
}

/// Per-length maxima `m_1..m_n` with one witness start `p_l` per length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsumProfile {
    #[serde(with = "serde_ext::rational_vec")]
    pub maxima: Vec<BigRational>,
    pub positions: Vec<usize>,
}

impl SubsumProfile {
    pub fn len(&self) -> usize {
        self.maxima.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maxima.is_empty()
    }

    /// `m_len`, 1-based.
    pub fn maximum(&self, len: usize) -> &BigRational {
        &self.maxima[len - 1]
    }

    /// `p_len`, 1-based.
    pub fn position(&self, len: usize) -> usize {
        self.positions[len - 1]
    }
}

/// `z_0..z_{2n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvolutionResult {
    #[serde(with = "serde_ext::rational_vec")]
    pub z: Vec<BigRational>,
}

fn prefix_sums(a: &[BigRational]) -> Vec<BigRational> {
    let mut prefix = Vec::with_capacity(a.len() + 1);
    prefix.push(BigRational::zero());
    for v in a {
        let next = prefix.last().unwrap() + v;
        prefix.push(next);
    }
    prefix
}

/// All window maxima with the smallest maximizing start per length.
pub fn mcsp_naive(a: &Sequence) -> SubsumProfile {
    let n = a.len();
    let prefix = prefix_sums(a.as_slice());
    let mut maxima = Vec::with_capacity(n);
    let mut positions = Vec::with_capacity(n);
    for len in 1..=n {
        let mut best = &prefix[len] - &prefix[0];
        let mut best_start = 1;
        for start in 2..=n - len + 1 {
            let sum = &prefix[start + len - 1] - &prefix[start - 1];
            if sum > best {
                best = sum;
                best_start = start;
            }
        }
        maxima.push(best);
        positions.push(best_start);
    }
    SubsumProfile { maxima, positions }
}

/// For every length `l`, every 1-based start whose window attains `m_l`.
pub fn window_maximizers(a: &Sequence) -> Vec<Vec<usize>> {
    let n = a.len();
    let prefix = prefix_sums(a.as_slice());
    (1..=n)
        .map(|len| {
            let sums: Vec<BigRational> =
                (1..=n - len + 1).map(|s| &prefix[s + len - 1] - &prefix[s - 1]).collect();
            let best = sums.iter().max().unwrap();
            sums.iter()
                .enumerate()
                .filter(|(_, s)| *s == best)
                .map(|(i, _)| i + 1)
                .collect()
        })
        .collect()
}

fn check_conv_inputs(x: &Sequence, y: &Sequence) -> Result<()> {
    if x.len() != y.len() {
        return Err(invalid(format!(
            "convolution inputs must have equal length, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

fn conv_by<F>(x: &Sequence, y: &Sequence, better: F) -> Result<ConvolutionResult>
where
    F: Fn(&BigRational, &BigRational) -> bool,
{
    check_conv_inputs(x, y)?;
    let n = x.len() - 1;
    let (xs, ys) = (x.as_slice(), y.as_slice());
    let z = (0..=2 * n)
        .map(|k| {
            let lo = k.saturating_sub(n);
            let hi = k.min(n);
            let mut best = &xs[lo] + &ys[k - lo];
            for i in lo + 1..=hi {
                let cand = &xs[i] + &ys[k - i];
                if better(&cand, &best) {
                    best = cand;
                }
            }
            best
        })
        .collect();
    Ok(ConvolutionResult { z })
}

/// `z_k = min { x_i + y_{k-i} }` over all valid `i`, for `k = 0..2n`.
pub fn minplus_conv(x: &Sequence, y: &Sequence) -> Result<ConvolutionResult> {
    conv_by(x, y, |c, b| c < b)
}

/// `z_k = max { x_i + y_{k-i} }`; equals `-minplus_conv(-x, -y)`.
pub fn maxplus_conv(x: &Sequence, y: &Sequence) -> Result<ConvolutionResult> {
    conv_by(x, y, |c, b| c > b)
}

pub(crate) fn abs_sum(values: &[BigRational]) -> BigRational {
    values.iter().map(|v| v.abs()).sum()
}
