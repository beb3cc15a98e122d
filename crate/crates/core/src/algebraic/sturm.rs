use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{IntPoly, Interval};
use crate::{Error, Result};

/// Sturm chain `p, p', -rem(p, p'), …` kept primitive with sign-correct
/// pseudo-remainders.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    pub fn new(p: &IntPoly) -> Self {
        let mut chain = vec![p.clone()];
        if p.degree().unwrap_or(0) == 0 {
            return SturmChain { chain };
        }
        chain.push(p.derivative());
        loop {
            let n = chain.len();
            let (a, b) = (&chain[n - 2], &chain[n - 1]);
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            let r = a.pseudo_rem(b);
            if r.is_zero() {
                break;
            }
            // prem multiplies by lc(b)^(δ+1); undo a negative factor's sign.
            let delta = a.degree().unwrap() - b.degree().unwrap();
            let flip = b.leading().unwrap().is_negative() && (delta + 1) % 2 == 1;
            let r = if flip { r } else { -&r };
            let g = r.content();
            let r = IntPoly::new(r.coeffs().iter().map(|c| c / &g).collect());
            chain.push(r);
        }
        SturmChain { chain }
    }

    fn variations<I: Iterator<Item = Ordering>>(signs: I) -> usize {
        let mut last = Ordering::Equal;
        let mut count = 0;
        for s in signs {
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &BigRational) -> usize {
        Self::variations(self.chain.iter().map(|p| p.sign_at(x)))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.chain.iter().map(|p| {
            let lead = p
                .leading()
                .map(|c| c.cmp(&BigInt::zero()))
                .unwrap_or(Ordering::Equal);
            let odd = p.degree().unwrap_or(0) % 2 == 1;
            if positive || !odd {
                lead
            } else {
                lead.reverse()
            }
        }))
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_in(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }

    /// Number of distinct real roots.
    pub fn count_real(&self) -> usize {
        self.variations_at_infinity(false)
            .saturating_sub(self.variations_at_infinity(true))
    }

    pub fn polynomial(&self) -> &IntPoly {
        &self.chain[0]
    }
}

/// Disjoint rational intervals each containing exactly one real root of `p`,
/// in increasing order.
///
/// A returned interval is either a point (an exact rational root) or has
/// endpoints at which `p` does not vanish, so its square-free part changes
/// sign across it.
pub fn isolate_real_roots(p: &IntPoly) -> Result<Vec<Interval>> {
    if p.is_zero() {
        return Err(Error::domain("cannot isolate roots of the zero polynomial"));
    }
    let sf = p.square_free_part();
    if sf.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let chain = SturmChain::new(&sf);
    let bound = sf.cauchy_bound();
    let mut out = Vec::new();
    isolate_in(&chain, -bound.clone(), bound, &mut out);
    Ok(out)
}

fn isolate_in(chain: &SturmChain, a: BigRational, b: BigRational, out: &mut Vec<Interval>) {
    // Invariant: p(a) != 0 and p(b) != 0.
    let mut stack = vec![(a, b)];
    let two = BigRational::from_integer(BigInt::from(2));
    let mut found = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let n = chain.count_in(&a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            found.push(Interval::new(a, b).expect("ordered"));
            continue;
        }
        let mid = (&a + &b) / &two;
        let p = chain.polynomial();
        if p.sign_at(&mid) != Ordering::Equal {
            stack.push((a, mid.clone()));
            stack.push((mid, b));
            continue;
        }
        // Exact rational root: carve out a neighbourhood containing only it.
        let mut delta = (&b - &a) / BigRational::from_integer(BigInt::from(4));
        loop {
            let l = &mid - &delta;
            let r = &mid + &delta;
            if chain.count_in(&l, &r) == 1 && p.sign_at(&l) != Ordering::Equal {
                found.push(Interval::point(mid.clone()));
                stack.push((a.clone(), l));
                stack.push((r, b.clone()));
                break;
            }
            delta /= &two;
        }
    }
    found.sort_by(|x, y| x.lo().cmp(y.lo()));
    // Neighbours may share an endpoint (never a root); shrink until disjoint.
    let p = chain.polynomial();
    for i in 1..found.len() {
        while found[i - 1].hi() >= found[i].lo() {
            let shrink = |iv: &Interval| {
                if iv.is_point() {
                    iv.clone()
                } else {
                    bisect(p, iv, &(iv.width() / &two))
                }
            };
            found[i - 1] = shrink(&found[i - 1]);
            found[i] = shrink(&found[i]);
        }
    }
    out.extend(found);
}

/// Bisects an isolating interval of the square-free polynomial `p` until its
/// width is at most `width`.
pub(crate) fn bisect(p: &IntPoly, enclosure: &Interval, width: &BigRational) -> Interval {
    if enclosure.is_point() {
        return enclosure.clone();
    }
    let mut lo = enclosure.lo().clone();
    let mut hi = enclosure.hi().clone();
    let sign_lo = p.sign_at(&lo);
    debug_assert_ne!(sign_lo, Ordering::Equal);
    let two = BigRational::from_integer(BigInt::from(2));
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        match p.sign_at(&mid) {
            Ordering::Equal => return Interval::point(mid),
            s if s == sign_lo => lo = mid,
            _ => hi = mid,
        }
    }
    Interval::new(lo, hi).expect("ordered")
}

/// Smallest power of two `2^-k` not exceeding `width`.
pub(crate) fn dyadic_width(width: &BigRational) -> BigRational {
    let mut w = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    while &w > width {
        w /= &two;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sqrt_two() {
        let roots = isolate_real_roots(&IntPoly::from_i64(&[-2, 0, 1])).unwrap();
        assert_eq!(roots.len(), 2);
        let p = IntPoly::from_i64(&[-2, 0, 1]);
        let r0 = bisect(&p, &roots[0], &q(1, 2));
        let r1 = bisect(&p, &roots[1], &q(1, 2));
        assert!(r0.is_subset_of(&Interval::new(q(-2, 1), q(-1, 1)).unwrap()));
        assert!(r1.is_subset_of(&Interval::new(q(1, 1), q(2, 1)).unwrap()));
        assert!(roots[0].hi() < roots[1].lo());
    }

    #[test]
    fn no_real_roots() {
        assert!(isolate_real_roots(&IntPoly::from_i64(&[1, 0, 1]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(isolate_real_roots(&IntPoly::zero()).is_err());
    }

    #[test]
    fn rational_roots_become_points() {
        // (x)(x-1)(x+1)(2x-1): roots at the bisection midpoints.
        let p = &(&IntPoly::from_i64(&[0, 1]) * &IntPoly::from_i64(&[-1, 0, 1]))
            * &IntPoly::from_i64(&[-1, 2]);
        let roots = isolate_real_roots(&p).unwrap();
        assert_eq!(roots.len(), 4);
        let chain = SturmChain::new(&p.square_free_part());
        for r in &roots {
            if r.is_point() {
                assert!(p.eval(r.lo()).is_zero());
            } else {
                assert_eq!(chain.count_in(r.lo(), r.hi()), 1);
            }
        }
        let expected = [q(-1, 1), q(0, 1), q(1, 2), q(1, 1)];
        for (r, e) in roots.iter().zip(expected.iter()) {
            assert!(r.contains(e), "{r} should contain {e}");
        }
    }

    #[test]
    fn repeated_roots_counted_once() {
        let p = &IntPoly::from_i64(&[-2, 0, 1]) * &IntPoly::from_i64(&[-2, 0, 1]);
        assert_eq!(isolate_real_roots(&p).unwrap().len(), 2);
    }

    #[test]
    fn chain_counts_all_roots() {
        let p = IntPoly::from_i64(&[1, -1, -1, -1, 1]);
        assert_eq!(SturmChain::new(&p).count_real(), 2);
        let p = IntPoly::from_i64(&[-6, 11, -6, 1]);
        assert_eq!(SturmChain::new(&p).count_real(), 3);
    }
}
