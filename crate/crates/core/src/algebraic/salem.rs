use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{AlgebraicNumber, IntPoly, Ring};
use crate::{Error, Result};

/// `Q_n(x) = x^n - x^(n-1) - … - x + 1`.
pub fn salem_polynomial(n: usize) -> Result<IntPoly> {
    if n < 4 {
        return Err(Error::domain(format!(
            "Q_n is only defined here for n >= 4 (got {n})"
        )));
    }
    let mut c = vec![-1i64; n + 1];
    c[0] = 1;
    c[n] = 1;
    Ok(IntPoly::from_i64(&c))
}

/// Largest real root `β_n` of `Q_n`.
pub fn salem_beta(n: usize) -> Result<AlgebraicNumber> {
    AlgebraicNumber::largest_real_root(&salem_polynomial(n)?)
}

/// `λ_n = 1/β_n`.
pub fn salem_lambda(n: usize) -> Result<AlgebraicNumber> {
    salem_beta(n)?.reciprocal()
}

/// `Z[λ_n]` with modulus `Q_n`.
pub fn lambda_ring(n: usize) -> Result<Ring> {
    Ring::integral(salem_polynomial(n)?, salem_lambda(n)?)
}

/// Exact check of `(x - 1) Q_n(x) = x^(n+1) - 2x^n + 2x - 1`.
pub fn salem_identity_holds(n: usize) -> Result<bool> {
    let lhs = &IntPoly::from_i64(&[-1, 1]) * &salem_polynomial(n)?;
    let mut c = vec![BigInt::zero(); n + 2];
    c[0] = BigInt::from(-1);
    c[1] = BigInt::from(2);
    c[n] = BigInt::from(-2);
    c[n + 1] = BigInt::one();
    Ok(lhs == IntPoly::new(c))
}

/// Certified truth value of `β_n^(n+1) > 2^n` for each `n` in the range.
pub fn verify_salem_growth(n_lo: usize, n_hi: usize) -> Result<Vec<(usize, bool)>> {
    if n_lo < 4 || n_lo > n_hi {
        return Err(Error::domain("need 4 <= n_lo <= n_hi"));
    }
    (n_lo..=n_hi)
        .map(|n| {
            let beta = salem_beta(n)?;
            // sign of x^(n+1) - 2^n at β_n
            let mut p = vec![BigRational::zero(); n + 2];
            p[0] = -BigRational::from_integer(BigInt::one() << n);
            p[n + 1] = BigRational::one();
            Ok((n, beta.sign_at(&p) == Ordering::Greater))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::{isolate_real_roots, Interval, SturmChain};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn coefficients_and_symmetry() {
        assert!(salem_polynomial(3).is_err());
        assert_eq!(
            salem_polynomial(4).unwrap(),
            IntPoly::from_i64(&[1, -1, -1, -1, 1])
        );
        assert_eq!(
            salem_polynomial(5).unwrap(),
            IntPoly::from_i64(&[1, -1, -1, -1, -1, 1])
        );
        for n in 4..=12 {
            assert!(salem_polynomial(n).unwrap().is_palindromic());
        }
    }

    #[test]
    fn q4_has_two_real_roots_larger_in_one_two() {
        let p = salem_polynomial(4).unwrap();
        // Brute-force sign oracle: Q_4(1) = -1, Q_4(1.8) > 0, Q_4(2) = 3.
        let f = |x: f64| x.powi(4) - x.powi(3) - x * x - x + 1.0;
        assert!(f(1.0) < 0.0 && f(1.8) > 0.0 && f(2.0) > 0.0);
        let roots = isolate_real_roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[1].is_subset_of(&Interval::from_ints(1, 2).unwrap()));
    }

    fn bisection_oracle(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(lo) < 0.0) == (f(mid) < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn beta4_and_lambda4_enclosures() {
        let f = |x: f64| x.powi(4) - x.powi(3) - x * x - x + 1.0;
        let oracle = bisection_oracle(f, 1.0, 2.0);
        assert!((oracle - 1.7220838).abs() < 1e-6);

        let w = q(1, 1_000_000_000);
        let b = salem_beta(4).unwrap().refine(&w);
        assert!(b.enclosure().width() <= w);
        assert!(b
            .enclosure()
            .is_subset_of(&Interval::new(q(1722083, 1000000), q(1722084, 1000000)).unwrap()));
        let l = salem_lambda(4).unwrap().refine(&w);
        assert!(l
            .enclosure()
            .is_subset_of(&Interval::new(q(580691, 1000000), q(580692, 1000000)).unwrap()));
        assert!((l.to_f64() - 1.0 / oracle).abs() < 1e-9);
    }

    #[test]
    fn growth_inequality() {
        let rows = verify_salem_growth(4, 30).unwrap();
        assert_eq!(rows[0], (4, false));
        assert!(rows[1..].iter().all(|&(_, ok)| ok));
        assert!(verify_salem_growth(3, 5).is_err());
    }

    #[test]
    fn identity_and_values_at_small_points() {
        for n in 4..=30 {
            assert!(salem_identity_holds(n).unwrap());
            let p = salem_polynomial(n).unwrap();
            assert_eq!(p.eval(&q(1, 1)), q(3 - n as i64, 1));
            assert!(p.eval(&q(2, 1)) > q(0, 1));
            if n >= 5 {
                // One real root in (1, 2]; Q_n(1) < 0 < Q_n(2).
                assert_eq!(SturmChain::new(&p).count_in(&q(1, 1), &q(2, 1)), 1);
            }
        }
    }
}
