use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebraic::Coords;
use crate::ifs::{enumerate_classes, EqualRatioIfs};
use crate::measure::AtomMeasure;
use crate::numeric::{ln_rational, rational_to_f64};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeBound {
    /// `log w_k / (k log λ)` at the minimizing level.
    pub bound: f64,
    pub level: usize,
    /// Largest class weight at `level`, as `num/den`.
    pub max_weight: String,
    /// `w_k > λ^k` decided exactly, equivalent to `bound < 1`.
    pub certified_below_one: bool,
}

/// Exact truth value of `w > λ^k`.
fn weight_exceeds_power(ifs: &EqualRatioIfs, w: &BigRational, k: usize) -> bool {
    let mut p = vec![BigRational::zero(); k + 1];
    p[0] = w.clone();
    p[k] -= BigRational::one();
    ifs.ring().generator().sign_at(&p) == Ordering::Greater
}

/// Upper bound for `τ'(+∞)` from the heaviest word-equivalence class:
/// `min_{1≤k≤k_max} log(max class weight at level k) / (k log λ)`.
pub fn tau_prime_infty_upper_bound(ifs: &EqualRatioIfs, k_max: usize) -> Result<SlopeBound> {
    if k_max == 0 {
        return Err(Error::domain("k_max must be positive"));
    }
    let ln_lambda = ifs.ring().generator().to_f64().ln();
    let mut best: Option<(f64, usize, BigRational)> = None;
    for k in 1..=k_max {
        let w = enumerate_classes(ifs, k)?.max_weight();
        let b = ln_rational(&w) / (k as f64 * ln_lambda);
        if best.as_ref().is_none_or(|(v, _, _)| b < *v) {
            best = Some((b, k, w));
        }
    }
    let (bound, level, w) = best.expect("k_max >= 1");
    Ok(SlopeBound {
        bound,
        level,
        certified_below_one: weight_exceeds_power(ifs, &w, level),
        max_weight: w.to_string(),
    })
}

/// True when the first-level images of the convex hull of the attractor
/// cover it, so the attractor is an interval.
pub fn dim_attractor_is_full(ifs: &EqualRatioIfs) -> bool {
    let ring = ifs.ring();
    let mut d: Vec<Coords> = ifs.translations().to_vec();
    ring.sort_by_value(&mut d);
    let spread = ring.sub(&d[d.len() - 1], &d[0]).expect("same ring");
    let reach = ring.mul_generator(&spread).expect("same ring");
    // Adjacent images overlap iff (d_{i+1} − d_i)(1 − λ) ≤ λ (d_max − d_min).
    d.windows(2).all(|w| {
        let gap = ring.sub(&w[1], &w[0]).expect("same ring");
        let lhs = ring
            .sub(&gap, &ring.mul_generator(&gap).expect("same ring"))
            .expect("same ring");
        ring.sign(&ring.sub(&lhs, &reach).expect("same ring")) != Ordering::Greater
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PackingResult {
    /// Ball masses in placement order.
    pub masses: Vec<BigRational>,
    pub value: f64,
}

/// Greedy packing by closed balls of radius `r` centred at atoms.
///
/// Atoms are swept left to right; a ball is placed at the first atom not
/// within `2r` of the previous centre, which keeps the balls disjoint. The
/// value `Σ μ(B)^q` is a heuristic lower bound for the packing supremum.
pub fn packing_sum(measure: &AtomMeasure, q: f64, r: &BigRational) -> Result<PackingResult> {
    if q.is_nan() || q <= 0.0 || !r.is_positive() {
        return Err(Error::domain("packing needs q > 0 and r > 0"));
    }
    let ring = measure.ring();
    let atoms = measure.atoms();
    let two_r = r * BigRational::from_integer(BigInt::from(2));
    // sign(x_j − x_i − t)
    let cmp_gap = |i: usize, j: usize, t: &BigRational| {
        let diff = ring
            .sub(&atoms[j].position, &atoms[i].position)
            .expect("same ring");
        ring.sign_affine(&diff, &BigRational::one(), &-t.clone())
    };
    let mut masses = Vec::new();
    let mut left = 0usize;
    let mut i = 0usize;
    while i < atoms.len() {
        // Atoms at distance <= r on both sides of centre i.
        while cmp_gap(left, i, r) == Ordering::Greater {
            left += 1;
        }
        let mut right = i;
        let mut num: u128 = 0;
        for a in &atoms[left..i] {
            num += a.weight_num;
        }
        while right < atoms.len() && cmp_gap(i, right, r) != Ordering::Greater {
            num += atoms[right].weight_num;
            right += 1;
        }
        masses.push(BigRational::new(
            BigInt::from(num),
            BigInt::from(measure.weight_den()),
        ));
        let mut next = right;
        while next < atoms.len() && cmp_gap(i, next, &two_r) != Ordering::Greater {
            next += 1;
        }
        i = next;
        left = left.max(right);
    }
    let value = crate::numeric::compensated_sum(masses.iter().map(|m| rational_to_f64(m).powf(q)));
    Ok(PackingResult { masses, value })
}
