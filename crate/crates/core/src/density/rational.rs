use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::Matrix;

/// Largest common denominator accepted when snapping decimals to rationals.
pub const DENOMINATOR_CAP: i64 = 1_000_000;

/// Best rational approximation of `x` with denominator at most `max_den`,
/// accepted only if it reproduces `x` to within a few ulps.
pub fn snap_rational(x: f64, max_den: i64) -> Option<Rational64> {
    if !x.is_finite() {
        return None;
    }
    let tol = 4.0 * f64::EPSILON * x.abs().max(1.0);
    // continued-fraction convergents
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= tol {
            return Some(Rational64::new(h1, k1));
        }
        let frac = rest - a as f64;
        if frac == 0.0 {
            break;
        }
        rest = 1.0 / frac;
    }
    if k1 > 0 && (h1 as f64 / k1 as f64 - x).abs() <= tol {
        Some(Rational64::new(h1, k1))
    } else {
        None
    }
}

pub fn ratio_to_f64(r: Rational64) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Square matrix of rationals sharing one positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalMatrix {
    n: usize,
    den: i64,
    nums: Vec<i64>,
}

impl RationalMatrix {
    pub fn new(n: usize, den: i64, nums: Vec<i64>) -> Result<Self> {
        if n == 0 || nums.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: nums.len(),
            });
        }
        if den <= 0 {
            return Err(Error::InvalidMatrix("denominator must be positive".into()));
        }
        Ok(RationalMatrix { n, den, nums })
    }

    /// Snap every entry to a rational and bring them to the least common
    /// denominator, which must not exceed [`DENOMINATOR_CAP`].
    pub fn from_matrix(r: &Matrix) -> Result<Self> {
        let mut ratios = Vec::with_capacity(r.n() * r.n());
        let mut den = 1i64;
        for &x in r.as_slice() {
            let q = snap_rational(x, DENOMINATOR_CAP).ok_or(Error::IrrationalEntries {
                value: x,
                cap: DENOMINATOR_CAP,
            })?;
            den = den.lcm(q.denom());
            if den > DENOMINATOR_CAP {
                return Err(Error::IrrationalEntries {
                    value: x,
                    cap: DENOMINATOR_CAP,
                });
            }
            ratios.push(q);
        }
        let nums = ratios
            .iter()
            .map(|q| q.numer() * (den / q.denom()))
            .collect();
        RationalMatrix::new(r.n(), den, nums)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn num(&self, i: usize, j: usize) -> i64 {
        self.nums[i * self.n + j]
    }

    pub fn get(&self, i: usize, j: usize) -> Rational64 {
        Rational64::new(self.num(i, j), self.den)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.num(i, j) == self.num(j, i)))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nums.iter().all(|x| !x.is_negative())
    }

    pub fn transpose(&self) -> RationalMatrix {
        let n = self.n;
        let nums = (0..n * n).map(|k| self.num(k % n, k / n)).collect();
        RationalMatrix { n, den: self.den, nums }
    }

    /// Exact entrywise sum; the denominators are brought to their lcm.
    pub fn add(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let den = self.den.lcm(&other.den);
        let (fa, fb) = (den / self.den, den / other.den);
        let nums = self
            .nums
            .iter()
            .zip(&other.nums)
            .map(|(a, b)| {
                a.checked_mul(fa)
                    .and_then(|x| b.checked_mul(fb).and_then(|y| x.checked_add(y)))
                    .ok_or(Error::Overflow("rational matrix sum"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RationalMatrix { n: self.n, den, nums })
    }

    /// Exact equality of values (denominators may differ).
    pub fn value_eq(&self, other: &RationalMatrix) -> bool {
        self.n == other.n
            && (0..self.n * self.n).all(|k| {
                Rational64::new(self.nums[k], self.den) == Rational64::new(other.nums[k], other.den)
            })
    }

    pub fn max_col_sum(&self) -> Rational64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.num(i, j).abs()).sum::<i64>())
            .max()
            .map(|s| Rational64::new(s, self.den))
            .unwrap_or_else(Rational64::zero)
    }

    pub fn max_row_sum(&self) -> Rational64 {
        self.transpose().max_col_sum()
    }

    pub fn to_matrix(&self) -> Matrix {
        let d = self.den as f64;
        Matrix::from_fn(self.n, |i, j| self.num(i, j) as f64 / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snaps_decimals() {
        assert_eq!(snap_rational(0.1, 1000), Some(Rational64::new(1, 10)));
        assert_eq!(snap_rational(0.6, 1000), Some(Rational64::new(3, 5)));
        assert_eq!(snap_rational(2.0 / 3.0, 1000), Some(Rational64::new(2, 3)));
        assert_eq!(snap_rational(3.0, 1000), Some(Rational64::new(3, 1)));
        assert_eq!(snap_rational(0.0, 1000), Some(Rational64::new(0, 1)));
        assert_eq!(snap_rational(std::f64::consts::PI, 1_000_000), None);
    }

    #[test]
    fn common_denominator() {
        let r = Matrix::from_rows(&[[0.5, 0.25], [0.25, 0.1]]).unwrap();
        let q = RationalMatrix::from_matrix(&r).unwrap();
        assert_eq!(q.den(), 20);
        assert_eq!(q.get(1, 1), Rational64::new(1, 10));
        assert!(q.is_symmetric());
        assert_eq!(q.max_col_sum(), Rational64::new(3, 4));
    }

    #[test]
    fn irrational_entries_rejected() {
        let r = Matrix::from_rows(&[[std::f64::consts::E]]).unwrap();
        assert!(matches!(
            RationalMatrix::from_matrix(&r),
            Err(Error::IrrationalEntries { .. })
        ));
    }
}
