//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Polynomial `Σ coeffs[i] x^i`. Trailing zero coefficients are trimmed, so
/// the zero polynomial has an empty coefficient list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `base^exp` for a possibly negative exponent; `base` must be nonzero when
/// `exp < 0`.
pub fn pow_rational(base: &BigRational, exp: i32) -> BigRational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn monomial(coeff: BigRational, degree: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        coeffs[degree] = coeff;
        Self::new(coeffs)
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| integer(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;

    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;

    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;

    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;

    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}x")?,
                _ => write!(f, "{mag}x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_trailing_zeros() {
        let p = RationalPoly::from_integers(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert!(RationalPoly::from_integers(&[0, 0]).is_zero());
    }

    #[test]
    fn derivative_and_product() {
        // (1 + x)(1 - x) = 1 - x^2, derivative -2x
        let a = RationalPoly::from_integers(&[1, 1]);
        let b = RationalPoly::from_integers(&[1, -1]);
        let prod = &a * &b;
        assert_eq!(prod, RationalPoly::from_integers(&[1, 0, -1]));
        assert_eq!(prod.derivative(), RationalPoly::from_integers(&[0, -2]));
    }

    #[test]
    fn exact_evaluation() {
        let p = RationalPoly::new(vec![rational(1, 3), integer(-4), integer(3)]);
        assert_eq!(p.eval(&rational(1, 3)), rational(1, 3) - rational(4, 3) + rational(1, 3));
        assert!((p.eval_f64(0.5) - (1.0 / 3.0 - 2.0 + 0.75)).abs() < 1e-15);
    }

    #[test]
    fn negative_powers() {
        assert_eq!(pow_rational(&integer(3), -1), rational(1, 3));
        assert_eq!(pow_rational(&rational(2, 3), 2), rational(4, 9));
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn display() {
        let p = RationalPoly::from_integers(&[2, -4, 3]);
        assert_eq!(p.to_string(), "3x^2 - 4x + 2");
    }
}
