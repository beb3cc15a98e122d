use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Interval;
use crate::{Error, Result};

/// Polynomial with arbitrary-precision integer coefficients, lowest degree
/// first. Trailing zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `x^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        IntPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    /// True when the coefficient list reads the same in both directions.
    pub fn is_palindromic(&self) -> bool {
        !self.is_zero() && self.coeffs.iter().eq(self.coeffs.iter().rev())
    }

    /// `x^deg · p(1/x)`.
    pub fn reversed(&self) -> Self {
        let start = self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
        Self::new(self.coeffs[start..].iter().rev().cloned().collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_some_and(Signed::is_negative) {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| {
                acc * x + BigRational::from_integer(c.clone())
            })
    }

    /// Exact sign of `p(x)`, evaluated on the cleared numerator
    /// `Σ c_i a^i b^(d-i)` for `x = a/b`, `b > 0`.
    pub fn sign_at(&self, x: &BigRational) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let a = x.numer();
        let b = x.denom();
        let mut acc = BigInt::zero();
        let mut bpow = BigInt::one();
        // Horner in homogeneous form: acc = c_d, then acc = acc*a + c_i*b^(d-i).
        for (k, c) in self.coeffs.iter().rev().enumerate() {
            if k == 0 {
                acc = c.clone();
            } else {
                bpow *= b;
                acc = acc * a + c * &bpow;
            }
        }
        acc.sign_ordering()
    }

    /// Interval extension of the Horner scheme.
    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let mut acc = Interval::point(BigRational::zero());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &Interval::point(BigRational::from_integer(c.clone()));
        }
        acc
    }

    /// Remainder `self mod m` for a monic divisor, with the quotient.
    pub fn div_rem_monic(&self, m: &IntPoly) -> Result<(IntPoly, IntPoly)> {
        if !m.is_monic() {
            return Err(Error::domain("divisor must be monic"));
        }
        let dm = m.degree().unwrap_or(0);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dm {
            return Ok((IntPoly::zero(), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dm];
        for i in (dm..rem.len()).rev() {
            let lead = std::mem::take(&mut rem[i]);
            if lead.is_zero() {
                continue;
            }
            for (j, mc) in m.coeffs[..dm].iter().enumerate() {
                rem[i - dm + j] -= &lead * mc;
            }
            quot[i - dm] = lead;
        }
        rem.truncate(dm);
        Ok((IntPoly::new(quot), IntPoly::new(rem)))
    }

    /// Pseudo-remainder `lc(d)^(deg a - deg d + 1) · a mod d`.
    pub fn pseudo_rem(&self, d: &IntPoly) -> IntPoly {
        let dd = d.degree().expect("pseudo_rem by zero polynomial");
        let lc = d.leading().unwrap();
        let Some(da) = self.degree() else {
            return IntPoly::zero();
        };
        if da < dd {
            return self.clone();
        }
        let mut e = da - dd + 1;
        let mut r = self.clone();
        while let Some(dr) = r.degree().filter(|&dr| dr >= dd) {
            let top = r.coeffs[dr].clone();
            let mut next: Vec<BigInt> = r.coeffs.iter().map(|c| c * lc).collect();
            for (j, dc) in d.coeffs.iter().enumerate() {
                next[dr - dd + j] -= &top * dc;
            }
            r = IntPoly::new(next);
            e -= 1;
        }
        let factor = num_traits::pow(lc.clone(), e);
        IntPoly::new(r.coeffs.iter().map(|c| c * &factor).collect())
    }

    /// Primitive greatest common divisor with positive leading coefficient.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a.primitive_part()
    }

    /// Square-free part `p / gcd(p, p')`, primitive.
    pub fn square_free_part(&self) -> IntPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.primitive_part();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.primitive_part();
        }
        exact_div(&self.primitive_part(), &g).primitive_part()
    }

    /// `1 + max |c_i / c_n|`, a strict upper bound on the magnitude of every
    /// root.
    pub fn cauchy_bound(&self) -> BigRational {
        let lead = self.leading().expect("cauchy_bound of zero").abs();
        let max = self
            .coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default();
        BigRational::one() + BigRational::new(max, lead)
    }

    pub fn to_rational(&self) -> Vec<BigRational> {
        self.coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect()
    }
}

/// Exact division of integer polynomials when `d | a` over `Q` with an
/// integral quotient up to content.
fn exact_div(a: &IntPoly, d: &IntPoly) -> IntPoly {
    let dd = d.degree().unwrap();
    let lc = BigRational::from_integer(d.leading().unwrap().clone());
    let mut rem: Vec<BigRational> = a.to_rational();
    let mut quot = vec![BigRational::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let q = &rem[i] / &lc;
        if q.is_zero() {
            continue;
        }
        for (j, dc) in d.coeffs.iter().enumerate() {
            rem[i - dd + j] -= &q * BigRational::from_integer(dc.clone());
        }
        quot[i - dd] = q;
    }
    let den = quot.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    IntPoly::new(
        quot.iter()
            .map(|q| (q * BigRational::from_integer(den.clone())).to_integer())
            .collect(),
    )
}

trait SignOrdering {
    fn sign_ordering(&self) -> Ordering;
}

impl SignOrdering for BigInt {
    fn sign_ordering(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).cloned().unwrap_or_default()
                        + rhs.coeffs.get(i).cloned().unwrap_or_default()
                })
                .collect(),
        )
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn trims_and_degrees() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert_eq!(p(&[0, 0]).degree(), None);
        assert!(p(&[]).is_zero());
    }

    #[test]
    fn display() {
        assert_eq!(
            p(&[1, -1, -1, -1, 1]).to_string(),
            "x^4 - x^3 - x^2 - x + 1"
        );
        assert_eq!(p(&[-2, 0, 3]).to_string(), "3x^2 - 2");
    }

    #[test]
    fn monic_division() {
        let q4 = p(&[1, -1, -1, -1, 1]);
        let (_, r) = IntPoly::monomial(4).div_rem_monic(&q4).unwrap();
        assert_eq!(r, p(&[-1, 1, 1, 1]));
        assert!(IntPoly::monomial(3).div_rem_monic(&p(&[1, 2])).is_err());
    }

    #[test]
    fn pseudo_remainder_identity() {
        // prem(a, b) = lc(b)^(deg a - deg b + 1) a - q b for some q.
        let a = p(&[3, 0, 5, 7, 2]);
        let b = p(&[1, -3, 2]);
        let r = a.pseudo_rem(&b);
        assert!(r.degree() < b.degree());
        // Check divisibility: 2^3 a - r must be divisible by b over Z.
        let scaled = &(&a * &p(&[8])) - &r;
        let g = scaled.gcd(&b);
        assert_eq!(g.degree(), b.degree());
    }

    #[test]
    fn gcd_and_square_free() {
        let a = &p(&[-1, 1]) * &p(&[-1, 1]);
        let a = &a * &p(&[2, 1]);
        assert_eq!(a.gcd(&a.derivative()), p(&[-1, 1]));
        assert_eq!(a.square_free_part(), &p(&[-1, 1]) * &p(&[2, 1]));
        assert_eq!(p(&[2, 4]).gcd(&p(&[3, 6])), p(&[1, 2]));
    }

    #[test]
    fn exact_sign() {
        let q = p(&[-2, 0, 1]);
        let x = BigRational::new(3.into(), 2.into());
        assert_eq!(q.sign_at(&x), Ordering::Greater);
        let x = BigRational::new(7.into(), 5.into());
        assert_eq!(q.sign_at(&x), Ordering::Less);
        let x = BigRational::new((-3).into(), 2.into());
        assert_eq!(q.sign_at(&x), Ordering::Greater);
        assert_eq!(p(&[-1, 1]).sign_at(&BigRational::one()), Ordering::Equal);
    }

    #[test]
    fn reversal() {
        assert_eq!(p(&[0, 2, 3, 5]).reversed(), p(&[5, 3, 2]));
        assert!(p(&[1, -1, -1, -1, 1]).is_palindromic());
    }
}
