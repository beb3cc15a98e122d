use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::sturm::{bisect, dyadic_width, SturmChain};
use super::{isolate_real_roots, IntPoly, Interval};
use crate::numeric::rational_to_f64;
use crate::{Error, Result};

/// A real algebraic number: a square-free primitive integer polynomial with
/// an isolating rational enclosure of one of its roots.
///
/// Values are immutable; refinement returns a new value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicNumber {
    minpoly: IntPoly,
    enclosure: Interval,
}

impl AlgebraicNumber {
    pub fn from_rational(r: BigRational) -> Self {
        let minpoly = IntPoly::new(vec![-r.numer().clone(), r.denom().clone()]);
        AlgebraicNumber {
            minpoly,
            enclosure: Interval::point(r),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// The unique root of `poly` in `[lo, hi]`; fails unless there is exactly
    /// one.
    pub fn from_root_in(poly: &IntPoly, enclosure: &Interval) -> Result<Self> {
        let roots = isolate_real_roots(poly)?;
        let sf = poly.square_free_part();
        let chain = SturmChain::new(&sf);
        let mut count = chain.count_in(enclosure.lo(), enclosure.hi());
        if sf.sign_at(enclosure.lo()) == Ordering::Equal {
            count += 1;
        }
        if count != 1 {
            return Err(Error::domain(format!(
                "{poly} has {count} real roots in {enclosure}, expected exactly one"
            )));
        }
        let iso = roots
            .into_iter()
            .find(|r| r.overlaps(enclosure) && root_inside(&sf, r, enclosure))
            .ok_or_else(|| Error::domain("root isolation disagrees with Sturm count"))?;
        Self::from_isolating(sf, iso)
    }

    /// Builds from an isolating interval produced by
    /// [`isolate_real_roots`](super::isolate_real_roots) on `poly`.
    pub fn from_isolating(poly: IntPoly, enclosure: Interval) -> Result<Self> {
        let minpoly = poly.square_free_part();
        if minpoly.degree().unwrap_or(0) == 0 {
            return Err(Error::domain("constant polynomial has no roots"));
        }
        if enclosure.is_point() {
            if minpoly.sign_at(enclosure.lo()) != Ordering::Equal {
                return Err(Error::domain("point enclosure is not a root"));
            }
            return Ok(Self::from_rational(enclosure.lo().clone()));
        }
        if minpoly.sign_at(enclosure.lo()) == minpoly.sign_at(enclosure.hi())
            || minpoly.sign_at(enclosure.lo()) == Ordering::Equal
        {
            return Err(Error::domain(
                "enclosure endpoints do not bracket a simple root",
            ));
        }
        if SturmChain::new(&minpoly).count_in(enclosure.lo(), enclosure.hi()) != 1 {
            return Err(Error::domain("enclosure does not isolate a single root"));
        }
        let mut out = AlgebraicNumber { minpoly, enclosure };
        out.reduce_rational();
        Ok(out)
    }

    /// All real roots of `poly`, increasing.
    pub fn real_roots(poly: &IntPoly) -> Result<Vec<AlgebraicNumber>> {
        isolate_real_roots(poly)?
            .into_iter()
            .map(|iv| Self::from_isolating(poly.clone(), iv))
            .collect()
    }

    /// Largest real root: the isolating interval with the greatest lower
    /// bound, certified maximal by a zero Sturm count above it.
    pub fn largest_real_root(poly: &IntPoly) -> Result<AlgebraicNumber> {
        let roots = isolate_real_roots(poly)?;
        let top = roots
            .into_iter()
            .max_by(|a, b| a.lo().cmp(b.lo()))
            .ok_or_else(|| Error::domain(format!("{poly} has no real roots")))?;
        let sf = poly.square_free_part();
        let bound = sf.cauchy_bound();
        if SturmChain::new(&sf).count_in(top.hi(), &bound) != 0 {
            return Err(Error::domain("largest-root certification failed"));
        }
        Self::from_isolating(sf, top)
    }

    /// Once the minimal polynomial has a linear factor vanishing inside the
    /// enclosure, collapse to that rational.
    fn reduce_rational(&mut self) {
        if self.minpoly.degree() == Some(1) {
            let c = self.minpoly.coeffs();
            let r = BigRational::new(-c[0].clone(), c[1].clone());
            *self = Self::from_rational(r);
        }
    }

    pub fn minpoly(&self) -> &IntPoly {
        &self.minpoly
    }

    pub fn enclosure(&self) -> &Interval {
        &self.enclosure
    }

    pub fn is_rational(&self) -> bool {
        self.enclosure.is_point()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then(|| self.enclosure.lo())
    }

    /// Same number with enclosure width at most `width`.
    pub fn refine(&self, width: &BigRational) -> AlgebraicNumber {
        if self.enclosure.is_point() || &self.enclosure.width() <= width {
            return self.clone();
        }
        // Bisection with dyadic steps keeps endpoint denominators small.
        let target = dyadic_width(width);
        let enclosure = bisect(&self.minpoly, &self.enclosure, &target);
        if enclosure.is_point() {
            return Self::from_rational(enclosure.lo().clone());
        }
        AlgebraicNumber {
            minpoly: self.minpoly.clone(),
            enclosure,
        }
    }

    /// Refines to width `2^-bits`.
    pub fn refine_bits(&self, bits: u32) -> AlgebraicNumber {
        self.refine(&BigRational::new(BigInt::one(), BigInt::one() << bits))
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.refine_bits(60).enclosure.midpoint())
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.sign_at(&[-r.clone(), BigRational::one()])
    }

    /// Reciprocal. A palindromic minimal polynomial is reused; otherwise the
    /// reversed polynomial is used when its leading coefficient is `±1`.
    pub fn reciprocal(&self) -> Result<AlgebraicNumber> {
        if let Some(r) = self.as_rational() {
            if r.is_zero() {
                return Err(Error::domain("reciprocal of zero"));
            }
            return Ok(Self::from_rational(r.recip()));
        }
        let target = if self.minpoly.is_palindromic() || self.minpoly.reversed() == -&self.minpoly {
            self.minpoly.clone()
        } else {
            let rev = self.minpoly.reversed().primitive_part();
            let constant = self.minpoly.coeffs()[0].abs();
            if !constant.is_one() {
                return Err(Error::domain(
                    "reciprocal needs constant coefficient ±1 (reverse polynomial not monic)",
                ));
            }
            rev
        };
        let chain = SturmChain::new(&target);
        let mut current = self.clone();
        loop {
            if let Ok(inv) = current.enclosure.recip() {
                let lo_root = target.sign_at(inv.lo()) == Ordering::Equal;
                let hi_root = target.sign_at(inv.hi()) == Ordering::Equal;
                if !lo_root && !hi_root && chain.count_in(inv.lo(), inv.hi()) == 1 {
                    return Self::from_isolating(target, inv);
                }
            }
            let w = current.enclosure.width() / BigRational::from_integer(BigInt::from(4));
            current = current.refine(&w);
        }
    }

    /// Exact sign of `P(α)` for a rational polynomial `P` (ascending
    /// coefficients).
    ///
    /// Interval evaluation on successively refined enclosures decides nonzero
    /// values; a zero value is recognised exactly through
    /// `gcd(P, minpoly)`, whose roots inside the isolating enclosure can only
    /// be `α`.
    pub fn sign_at(&self, poly: &[BigRational]) -> Ordering {
        let p = clear_denominators(poly);
        if p.is_zero() {
            return Ordering::Equal;
        }
        if let Some(r) = self.as_rational() {
            return p.sign_at(r);
        }
        let mut current = self.clone();
        if let Some(s) = definite_sign(&p.eval_interval(&current.enclosure)) {
            return s;
        }
        let g = p.gcd(&self.minpoly);
        if g.degree().unwrap_or(0) > 0 {
            let chain = SturmChain::new(&g.square_free_part());
            let e = &current.enclosure;
            if chain.count_in(e.lo(), e.hi()) > 0 {
                return Ordering::Equal;
            }
        }
        let mut bits = 64u32;
        loop {
            current = current.refine_bits(bits);
            if let Some(s) = definite_sign(&p.eval_interval(&current.enclosure)) {
                return s;
            }
            bits = bits.saturating_mul(2);
        }
    }

    /// Compares two algebraic numbers exactly.
    ///
    /// Overlapping enclosures are equal iff `gcd` of the two polynomials has a
    /// root in the overlap (that root is then the isolated root of both).
    pub fn cmp_exact(&self, other: &AlgebraicNumber) -> Ordering {
        if let Some(r) = other.as_rational() {
            return self.cmp_rational(r);
        }
        if let Some(r) = self.as_rational() {
            return other.cmp_rational(r).reverse();
        }
        let g = self.minpoly.gcd(&other.minpoly);
        let mut a = self.clone();
        let mut b = other.clone();
        let mut checked = false;
        let mut bits = 32u32;
        loop {
            if a.enclosure.hi() < b.enclosure.lo() {
                return Ordering::Less;
            }
            if b.enclosure.hi() < a.enclosure.lo() {
                return Ordering::Greater;
            }
            if !checked && g.degree().unwrap_or(0) > 0 {
                let lo = a.enclosure.lo().clone().max(b.enclosure.lo().clone());
                let hi = a.enclosure.hi().clone().min(b.enclosure.hi().clone());
                if contains_root_of(&g, &lo, &hi) {
                    return Ordering::Equal;
                }
                checked = true;
            }
            a = a.refine_bits(bits);
            b = b.refine_bits(bits);
            bits = bits.saturating_mul(2);
        }
    }
}

fn contains_root_of(p: &IntPoly, lo: &BigRational, hi: &BigRational) -> bool {
    let sf = p.square_free_part();
    sf.sign_at(lo) == Ordering::Equal || SturmChain::new(&sf).count_in(lo, hi) > 0
}

fn root_inside(sf: &IntPoly, iso: &Interval, enclosure: &Interval) -> bool {
    let lo = iso.lo().clone().max(enclosure.lo().clone());
    let hi = iso.hi().clone().min(enclosure.hi().clone());
    if lo > hi {
        return false;
    }
    sf.sign_at(&lo) == Ordering::Equal || SturmChain::new(sf).count_in(&lo, &hi) == 1
}

fn definite_sign(v: &Interval) -> Option<Ordering> {
    if v.is_positive() {
        Some(Ordering::Greater)
    } else if v.is_negative() {
        Some(Ordering::Less)
    } else if v.is_point() {
        Some(Ordering::Equal)
    } else {
        None
    }
}

/// Multiplies by the positive lcm of denominators.
pub(crate) fn clear_denominators(poly: &[BigRational]) -> IntPoly {
    let den = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    IntPoly::new(
        poly.iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect(),
    )
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => write!(f, "{r}"),
            None => write!(
                f,
                "root of {} in {}",
                self.minpoly,
                self.refine_bits(40).enclosure.to_decimal(10)
            ),
        }
    }
}
