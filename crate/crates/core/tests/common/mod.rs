//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use salemfrac::algebraic::{Coords, Fixed, PowerTable};
use salemfrac::awsc::dyadic_word_length;
use salemfrac::ifs::EqualRatioIfs;

pub fn systems() -> Vec<(&'static str, EqualRatioIfs)> {
    vec![
        ("golden", EqualRatioIfs::golden_bernoulli().unwrap()),
        ("lambda4", EqualRatioIfs::salem_bernoulli(4).unwrap()),
        ("cantor", EqualRatioIfs::cantor()),
    ]
}

/// `translation -> (count, weight)` over all words of length `k`, each
/// translation built from explicit powers `d_i λ^(j-1)`.
pub fn brute_force(ifs: &EqualRatioIfs, k: usize) -> BTreeMap<Coords, (u128, BigRational)> {
    let ring = ifs.ring();
    let l = ifs.len();
    let mut out: BTreeMap<Coords, (u128, BigRational)> = BTreeMap::new();
    for code in 0..l.pow(k as u32) {
        let mut c = code;
        let mut t = ring.zero();
        let mut w = BigRational::one();
        for j in 0..k {
            let i = c % l;
            c /= l;
            let term = ring.mul_generator_pow(&ifs.translations()[i], j).unwrap();
            t = ring.add(&t, &term).unwrap();
            w *= &ifs.weights()[i];
        }
        let slot = out
            .entry(t)
            .or_insert((0, BigRational::from_integer(BigInt::from(0))));
        slot.0 += 1;
        slot.1 += w;
    }
    out
}

/// Distinct translations of all words of length `l`.
pub fn word_translations(ifs: &EqualRatioIfs, l: usize) -> Vec<Coords> {
    let mut out = BTreeSet::new();
    let k = ifs.len();
    for code in 0..k.pow(l as u32) {
        let mut c = code;
        let word: Vec<usize> = (0..l)
            .map(|_| {
                let d = c % k + 1;
                c /= k;
                d
            })
            .collect();
        out.insert(ifs.compose_word(&word).unwrap().translation);
    }
    out.into_iter().collect()
}

/// `(1-λ)` times the image endpoints, and `(1-λ)λ^l`.
pub fn scaled_images(ifs: &EqualRatioIfs, l: usize) -> (Vec<(Coords, Coords)>, Coords, Coords) {
    let r = ifs.ring();
    let one = r.integer(1);
    let om = r.sub(&one, &r.mul_generator(&one).unwrap()).unwrap();
    let (dmin, dmax) = ifs.extreme_translations();
    let lo_off = r.mul_generator_pow(dmin, l).unwrap();
    let hi_off = r.mul_generator_pow(dmax, l).unwrap();
    let imgs = word_translations(ifs, l)
        .iter()
        .map(|t| {
            let base = r.mul(t, &om).unwrap();
            (
                r.add(&base, &lo_off).unwrap(),
                r.add(&base, &hi_off).unwrap(),
            )
        })
        .collect();
    let h = r.mul_generator_pow(&om, l).unwrap();
    (imgs, h, om)
}

/// Count of images meeting each closed dyadic cell, maximized over cells.
pub fn dyadic_brute(ifs: &EqualRatioIfs, n: u32) -> usize {
    let l = dyadic_word_length(ifs, n);
    let (imgs, _, om) = scaled_images(ifs, l);
    let r = ifs.ring();
    let lam = r.generator().to_f64();
    let scale = (n as f64).exp2() / (1.0 - lam);
    let vmin = imgs
        .iter()
        .map(|x| (r.to_f64(&x.0) * scale).floor() as i64)
        .min()
        .unwrap()
        - 2;
    let vmax = imgs
        .iter()
        .map(|x| (r.to_f64(&x.1) * scale).floor() as i64)
        .max()
        .unwrap()
        + 2;
    let table = PowerTable::new(r, 96);
    let keyed = |c: Coords| (table.enclose(&c), c);
    let imgs: Vec<_> = imgs
        .into_iter()
        .map(|(lo, hi)| {
            (
                keyed(r.scale(&lo, 1i64 << n).unwrap()),
                keyed(r.scale(&hi, 1i64 << n).unwrap()),
            )
        })
        .collect();
    let cmp = |a: &(Fixed, Coords), b: &(Fixed, Coords)| {
        a.0.order(&b.0).unwrap_or_else(|| r.compare(&a.1, &b.1))
    };
    (vmin..=vmax)
        .map(|v| {
            let (left, right) = (
                keyed(r.scale(&om, v).unwrap()),
                keyed(r.scale(&om, v + 1).unwrap()),
            );
            imgs.iter()
                .filter(|(lo, hi)| {
                    cmp(lo, &right) != Ordering::Greater && cmp(hi, &left) != Ordering::Less
                })
                .count()
        })
        .max()
        .unwrap()
}

/// The count of images met by `[x-h, x+h]` is largest just as the right
/// edge reaches some `lo_u`, so every such window is tested.
pub fn centered_brute(ifs: &EqualRatioIfs, n: u32) -> usize {
    let l = n as usize;
    let (imgs, h, _) = scaled_images(ifs, l);
    let r = ifs.ring();
    let two_h = r.scale(&h, 2).unwrap();
    imgs.iter()
        .map(|(lo_u, _)| {
            // Window [lo_u - 2h, lo_u] in scaled coordinates.
            let left = r.sub(lo_u, &two_h).unwrap();
            imgs.iter()
                .filter(|(lo, hi)| {
                    r.compare(lo, lo_u) != Ordering::Greater
                        && r.compare(hi, &left) != Ordering::Less
                })
                .count()
        })
        .max()
        .unwrap()
}

/// `Σ_ω r_ω^s` by walking the whole tree of `ω ∈ D_ℓ`.
pub fn tree_sum(branches: &[u64], ratios: &[f64], s: f64) -> f64 {
    fn walk(branches: &[u64], ratios: &[f64], radius: f64, s: f64) -> f64 {
        match branches.split_first() {
            None => radius.powf(s),
            Some((&n, rest)) => (0..n)
                .map(|_| walk(rest, &ratios[1..], radius * ratios[0], s))
                .sum(),
        }
    }
    walk(branches, ratios, 1.0, s)
}

pub fn bisect_root(branches: &[u64], ratios: &[f64]) -> f64 {
    // Σ r^s is decreasing in s, ≥ 1 at s = 0.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while tree_sum(branches, ratios, hi) > 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tree_sum(branches, ratios, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `log Σ p_i^q / log λ` for an equal-ratio system with disjoint first-level
/// images.
pub fn closed_form(weights: &[f64], lambda: f64, q: f64) -> f64 {
    weights.iter().map(|p| p.powf(q)).sum::<f64>().ln() / lambda.ln()
}

/// Independent dyadic moment sum for `{x/3, x/3 + 2/3}` with weights
/// `(w0, w1)`: atoms are `x/3^n` with `x` in base 3 over digits `{0, 2}`.
pub fn ternary_oracle(w: [f64; 2], n: u32, m: u32, q: f64) -> f64 {
    let mut atoms: Vec<(u128, f64)> = vec![(0, 1.0)];
    for _ in 0..n {
        atoms = atoms
            .iter()
            .flat_map(|&(x, p)| [(3 * x, p * w[0]), (3 * x + 2, p * w[1])])
            .collect();
    }
    let den = 3u128.pow(n);
    let mut boxes = std::collections::BTreeMap::<u128, f64>::new();
    for (x, p) in atoms {
        *boxes.entry((x << m) / den).or_default() += p;
    }
    boxes.values().map(|v| v.powf(q)).sum::<f64>().ln() / (-(m as f64) * 2f64.ln())
}
