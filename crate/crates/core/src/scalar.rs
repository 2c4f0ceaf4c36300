//! Scalar abstraction shared by every matrix and graph type in the crate.
//!
//! All closed forms are identities over a field, so the math is written once
//! against [`Scalar`]. [`crate::Rational`] is the exact instance used by the
//! CLI, the fuzzer and the acceptance suite; `f64`/`f32` work for quick
//! numerical experiments but zero tests on them are only as good as floating
//! point allows.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

/// A field element usable as an edge weight or matrix entry.
pub trait Scalar:
    Num + Signed + Clone + Debug + Display + PartialOrd + FromPrimitive + Send + Sync + 'static
{
    /// `true` when `+ - * /` never round.
    const EXACT: bool;

    /// Determinant of the square row-major `n x n` array `entries`.
    ///
    /// The default runs fraction-free elimination directly over `Self`.
    fn determinant(n: usize, entries: &[Self]) -> Self {
        bareiss(n, entries.to_vec())
    }

    /// Product of the row-major `rows x inner` array `a` and the
    /// `inner x cols` array `b`.
    fn matmul(rows: usize, inner: usize, cols: usize, a: &[Self], b: &[Self]) -> Vec<Self> {
        let mut out = vec![Self::zero(); rows * cols];
        for i in 0..rows {
            for k in 0..inner {
                let x = &a[i * inner + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..cols {
                    let idx = i * cols + j;
                    out[idx] = out[idx].clone() + x.clone() * b[k * cols + j].clone();
                }
            }
        }
        out
    }

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("every scalar type represents small integers")
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
}

impl Scalar for f32 {
    const EXACT: bool = false;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    /// Clears denominators row by row, then runs integer-preserving
    /// elimination over `BigInt` so no gcd work happens inside the loop.
    fn determinant(n: usize, entries: &[Self]) -> Self {
        if n == 0 {
            return Self::one();
        }
        let mut scale = BigInt::one();
        let mut ints = Vec::with_capacity(n * n);
        for row in entries.chunks(n) {
            let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            for q in row {
                ints.push(q.numer() * (&lcm / q.denom()));
            }
            scale *= lcm;
        }
        BigRational::new(bareiss(n, ints), scale)
    }

    /// Scales each row of `a` and each column of `b` to integers, so the
    /// inner sums run over `BigInt` and only the outputs get reduced.
    fn matmul(rows: usize, inner: usize, cols: usize, a: &[Self], b: &[Self]) -> Vec<Self> {
        let row_lcm: Vec<BigInt> = a
            .chunks(inner.max(1))
            .take(rows)
            .map(|r| r.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom())))
            .collect();
        let col_lcm: Vec<BigInt> = (0..cols)
            .map(|j| (0..inner).fold(BigInt::one(), |acc, k| acc.lcm(b[k * cols + j].denom())))
            .collect();
        let ai: Vec<BigInt> = (0..rows * inner)
            .map(|x| {
                let q = &a[x];
                q.numer() * (&row_lcm[x / inner] / q.denom())
            })
            .collect();
        // column-major so the inner loop walks contiguous memory
        let bi: Vec<BigInt> = (0..cols * inner)
            .map(|x| {
                let (j, k) = (x / inner, x % inner);
                let q = &b[k * cols + j];
                q.numer() * (&col_lcm[j] / q.denom())
            })
            .collect();
        let mut out = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let ar = &ai[i * inner..(i + 1) * inner];
            for j in 0..cols {
                let bc = &bi[j * inner..(j + 1) * inner];
                let mut acc = BigInt::zero();
                for (x, y) in ar.iter().zip(bc) {
                    if !x.is_zero() && !y.is_zero() {
                        acc += x * y;
                    }
                }
                out.push(BigRational::new(acc, &row_lcm[i] * &col_lcm[j]));
            }
        }
        out
    }
}

/// Bareiss elimination over an integral domain with exact division.
///
/// Every intermediate is a minor of the input, so over the integers nothing
/// ever leaves `Z`.
pub(crate) fn bareiss<R: Num + Clone>(n: usize, mut a: Vec<R>) -> R {
    if n == 0 {
        return R::one();
    }
    let mut negate = false;
    let mut prev = R::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                return R::zero();
            };
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            negate = !negate;
        }
        let pivot = a[k * n + k].clone();
        for i in k + 1..n {
            let lead = a[i * n + k].clone();
            for j in k + 1..n {
                let v = a[i * n + j].clone() * pivot.clone() - lead.clone() * a[k * n + j].clone();
                a[i * n + j] = v / prev.clone();
            }
            a[i * n + k] = R::zero();
        }
        prev = pivot;
    }
    let last = a[n * n - 1].clone();
    if negate {
        R::zero() - last
    } else {
        last
    }
}

/// Parses `"-3"` or `"p/q"` into a canonical rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseRationalError> {
    let s = s.trim();
    let err = || ParseRationalError(s.to_owned());
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not an integer or p/q rational: {0:?}")]
pub struct ParseRationalError(pub String);

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parse_is_canonical() {
        assert_eq!(q("2/4").to_string(), "1/2");
        assert_eq!(q("3/-6").to_string(), "-1/2");
        assert_eq!(q("-3").to_string(), "-3");
        assert_eq!(q("0/7").to_string(), "0");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn bareiss_integer_cases() {
        let m: Vec<BigInt> = [1, 2, 3, 4].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(bareiss(2, m), BigInt::from(-2));
        // needs a row swap
        let m: Vec<BigInt> = [0, 1, 1, 0].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(bareiss(2, m), BigInt::from(-1));
        assert_eq!(bareiss::<BigInt>(0, vec![]), BigInt::one());
    }

    #[test]
    fn rational_determinant_clears_denominators() {
        let m = vec![q("1/2"), q("1/3"), q("1/4"), q("1/5")];
        // 1/10 - 1/12
        assert_eq!(BigRational::determinant(2, &m), q("1/60"));
    }
}
