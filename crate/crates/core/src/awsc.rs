//! Separation statistics: the window counter `t_n` and gaps of the signed
//! digit sets `{Σ ε_i β^i}`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::algebraic::{Coords, Interval, PowerTable, Ring};
use crate::ifs::{enumerate_classes_with_budget, EqualRatioIfs, DEFAULT_ENTRY_BUDGET};
use crate::{Error, Result};

const TABLE_BITS: u32 = 96;

/// How the windows of scale `n` are laid out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowConvention {
    /// Closed dyadic cells of side `2^-n`, maps of the word length `n'` with
    /// `λ^n' ≤ 2^-n < λ^(n'-1)`.
    DyadicBox,
    /// Windows `[x - λ^n, x + λ^n]`, maps of word length `n`.
    CenteredBall,
}

impl fmt::Display for WindowConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowConvention::DyadicBox => "dyadic-box",
            WindowConvention::CenteredBall => "centered-ball",
        })
    }
}

impl FromStr for WindowConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dyadic-box" | "dyadic" => Ok(WindowConvention::DyadicBox),
            "centered-ball" | "centered" => Ok(WindowConvention::CenteredBall),
            _ => Err(Error::domain(format!("unknown window convention '{s}'"))),
        }
    }
}

/// Smallest `L` with `λ^L ≤ 2^-n`.
pub fn dyadic_word_length(ifs: &EqualRatioIfs, n: u32) -> usize {
    let g = ifs.ring().generator();
    let target = BigRational::new(BigInt::one(), BigInt::one() << n);
    let guess = ((n as f64) * std::f64::consts::LN_2 / -g.to_f64().ln()).floor() as usize;
    let le = |l: usize| {
        let mut p = vec![BigRational::zero(); l + 1];
        p[l] = BigRational::one();
        p[0] -= &target;
        g.sign_at(&p) != Ordering::Greater
    };
    let mut l = guess.saturating_sub(1);
    while l > 0 && le(l - 1) {
        l -= 1;
    }
    while !le(l) {
        l += 1;
    }
    l
}

/// Shared data for comparing image-interval endpoints.
///
/// Endpoints are `E/(1-λ)` with `E` in the ring, so every comparison is a
/// sign test on a ring element.
struct Endpoints<'a> {
    ring: &'a Ring,
    one_minus: Coords,
    lambda: f64,
    level: usize,
    dmin: Coords,
    dmax: Coords,
}

impl<'a> Endpoints<'a> {
    fn new(ifs: &'a EqualRatioIfs, level: usize) -> Result<Self> {
        let ring = ifs.ring();
        let one = ring.integer(1);
        let one_minus = ring.sub(&one, &ring.mul_generator(&one)?)?;
        let (dmin, dmax) = ifs.extreme_translations();
        Ok(Endpoints {
            ring,
            one_minus,
            lambda: ring.generator().to_f64(),
            level,
            dmin: dmin.clone(),
            dmax: dmax.clone(),
        })
    }

    /// `(1-λ)` times the left and right endpoints of `S_u(hull K)`.
    fn scaled(&self, t: &Coords) -> Result<(Coords, Coords)> {
        let r = self.ring;
        let base = r.mul(t, &self.one_minus)?;
        let lo = r.add(&base, &r.mul_generator_pow(&self.dmin, self.level)?)?;
        let hi = r.add(&base, &r.mul_generator_pow(&self.dmax, self.level)?)?;
        Ok((lo, hi))
    }

    /// Sign of `x·2^n - k` where `x = e/(1-λ)`.
    fn cmp_dyadic(&self, e: &Coords, n: u32, k: i64) -> Result<Ordering> {
        let r = self.ring;
        let lhs = r.scale(e, 1i64 << n)?;
        let rhs = r.scale(&self.one_minus, k)?;
        Ok(r.sign(&r.sub(&lhs, &rhs)?))
    }

    /// `floor(x·2^n)` and whether `x·2^n` is an integer.
    fn floor_dyadic(&self, e: &Coords, n: u32) -> Result<(i64, bool)> {
        let est = self.ring.to_f64(e) / (1.0 - self.lambda) * (n as f64).exp2();
        let mut k = est.floor() as i64;
        while self.cmp_dyadic(e, n, k)? == Ordering::Less {
            k -= 1;
        }
        while self.cmp_dyadic(e, n, k + 1)? != Ordering::Less {
            k += 1;
        }
        Ok((k, self.cmp_dyadic(e, n, k)? == Ordering::Equal))
    }
}

/// One evaluation of `t_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TnCount {
    pub n: u32,
    pub convention: WindowConvention,
    /// Length of the words whose images are counted.
    pub word_length: usize,
    /// Distinct maps at that length.
    pub classes: usize,
    pub t_n: usize,
}

pub fn t_n_count(ifs: &EqualRatioIfs, n: u32, convention: WindowConvention) -> Result<usize> {
    Ok(t_n_count_with_budget(ifs, n, convention, DEFAULT_ENTRY_BUDGET)?.t_n)
}

/// Largest number of distinct maps `S_u` whose closed image interval
/// `S_u(hull K)` meets a single window.
pub fn t_n_count_with_budget(
    ifs: &EqualRatioIfs,
    n: u32,
    convention: WindowConvention,
    budget: usize,
) -> Result<TnCount> {
    if n > 40 {
        return Err(Error::domain("scale n above 40 is not supported"));
    }
    let level = match convention {
        WindowConvention::DyadicBox => dyadic_word_length(ifs, n),
        WindowConvention::CenteredBall => n as usize,
    };
    let table = enumerate_classes_with_budget(ifs, level, budget)?;
    let mut ts: Vec<Coords> = table
        .into_entries()
        .into_iter()
        .map(|e| e.translation)
        .collect();
    let ep = Endpoints::new(ifs, level)?;
    let t_n = match convention {
        WindowConvention::CenteredBall => {
            ep.ring.sort_by_value(&mut ts);
            centered_sweep(&ep, &ts)?
        }
        WindowConvention::DyadicBox => dyadic_sweep(&ep, &ts, n)?,
    };
    Ok(TnCount {
        n,
        convention,
        word_length: level,
        classes: ts.len(),
        t_n,
    })
}

/// Two-pointer sweep over translations sorted by value.
///
/// A window of half-width `h = λ^L` meets the image of `t` iff its centre
/// lies in `[lo_t - h, hi_t + h]`. These intervals share one length, so the
/// deepest closed overlap at the start of `i` counts the `j ≤ i` with
/// `(t_i - t_j)(1-λ) ≤ λ^L (d_max - d_min + 2(1-λ))`.
fn centered_sweep(ep: &Endpoints, ts: &[Coords]) -> Result<usize> {
    let r = ep.ring;
    let spread = r.sub(&ep.dmax, &ep.dmin)?;
    let reach = r.mul_generator_pow(&r.add(&spread, &r.scale(&ep.one_minus, 2)?)?, ep.level)?;
    let mut best = 0;
    let mut j = 0;
    for i in 0..ts.len() {
        loop {
            let gap = r.mul(&r.sub(&ts[i], &ts[j])?, &ep.one_minus)?;
            if r.sign(&r.sub(&gap, &reach)?) == Ordering::Greater {
                j += 1;
            } else {
                break;
            }
        }
        best = best.max(i - j + 1);
    }
    Ok(best)
}

/// Event sweep over the closed cells `[v 2^-n, (v+1) 2^-n]` met by each
/// image interval.
fn dyadic_sweep(ep: &Endpoints, ts: &[Coords], n: u32) -> Result<usize> {
    let spans = ts
        .par_iter()
        .map(|t| {
            let (lo, hi) = ep.scaled(t)?;
            let (a, exact) = ep.floor_dyadic(&lo, n)?;
            let (b, _) = ep.floor_dyadic(&hi, n)?;
            Ok((if exact { a - 1 } else { a }, b))
        })
        .collect::<Result<Vec<(i64, i64)>>>()?;
    let mut events: Vec<(i64, i32)> = Vec::with_capacity(2 * spans.len());
    for (a, b) in spans {
        events.push((a, 1));
        events.push((b + 1, -1));
    }
    // Closings at a cell sort before openings there.
    events.sort_unstable();
    let (mut cur, mut best) = (0i64, 0i64);
    for (_, d) in events {
        cur += d as i64;
        best = best.max(cur);
    }
    Ok(best as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AwscRow {
    pub n: u32,
    pub word_length: usize,
    pub classes: usize,
    pub t_n: usize,
    /// `log2(t_n)/n`, zero at `n = 0`.
    pub log2_tn_over_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AwscProfile {
    pub convention: WindowConvention,
    pub rows: Vec<AwscRow>,
}

impl AwscProfile {
    /// `log2(t_n)/n ≤ bound` at the largest `n`; vacuous on an empty profile.
    pub fn last_ratio_at_most(&self, bound: f64) -> bool {
        self.rows.last().is_none_or(|r| r.log2_tn_over_n <= bound)
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("n,t_n,log2tn_over_n,convention\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.*},{}\n",
                r.n, r.t_n, digits, r.log2_tn_over_n, self.convention
            ));
        }
        out
    }
}

pub fn awsc_profile(
    ifs: &EqualRatioIfs,
    ns: impl IntoIterator<Item = u32>,
    convention: WindowConvention,
    budget: usize,
) -> Result<AwscProfile> {
    let ns: Vec<u32> = ns.into_iter().collect();
    let rows = ns
        .par_iter()
        .map(|&n| {
            let c = t_n_count_with_budget(ifs, n, convention, budget)?;
            Ok(AwscRow {
                n,
                word_length: c.word_length,
                classes: c.classes,
                t_n: c.t_n,
                log2_tn_over_n: if n == 0 {
                    0.0
                } else {
                    (c.t_n as f64).log2() / n as f64
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AwscProfile { convention, rows })
}

/// Smallest positive distance in a truncated signed digit set.
#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    /// Certified enclosure of the gap.
    pub gap: Interval,
    /// The gap as a ring element.
    pub coords: Coords,
    /// Distinct values in the set.
    pub elements: usize,
}

/// Minimal positive gap of `{Σ_{i=0}^{cap} ε_i β^i : |ε_i| ≤ m}` where `β`
/// is the ring generator.
pub fn yset_min_gap(beta: &Ring, m: u32, degree_cap: u32, budget: usize) -> Result<GapReport> {
    if beta.generator().cmp_rational(&BigRational::one()) != Ordering::Greater {
        return Err(Error::domain("beta must exceed 1"));
    }
    if m == 0 {
        return Err(Error::domain("digit bound m must be positive"));
    }
    let size = (2 * m as u128 + 1)
        .checked_pow(degree_cap + 1)
        .unwrap_or(u128::MAX);
    if size > budget as u128 {
        return Err(Error::Budget {
            level: degree_cap as usize,
            entries: size.min(usize::MAX as u128) as usize,
            budget,
        });
    }
    let m = m as i64;
    let digits: Vec<Coords> = (-m..=m).map(|e| beta.integer(e)).collect();
    let mut set: FxHashSet<Coords> = std::iter::once(beta.zero()).collect();
    for _ in 0..=degree_cap {
        let mut next = FxHashSet::default();
        next.reserve(set.len() * digits.len());
        for s in &set {
            let bs = beta.mul_generator(s)?;
            for d in &digits {
                next.insert(beta.add(&bs, d)?);
            }
        }
        set = next;
    }
    let table = PowerTable::new(beta, TABLE_BITS);
    let mut items: Vec<(crate::algebraic::Fixed, Coords)> =
        set.into_iter().map(|c| (table.enclose(&c), c)).collect();
    items.sort_by(|a, b| a.0.order(&b.0).unwrap_or_else(|| beta.compare(&a.1, &b.1)));
    let diffs = items
        .windows(2)
        .map(|w| {
            let d = beta.sub(&w[1].1, &w[0].1)?;
            Ok((table.enclose(&d), d))
        })
        .collect::<Result<Vec<_>>>()?;
    let min_hi = diffs
        .iter()
        .map(|d| d.0.hi)
        .min()
        .ok_or_else(|| Error::domain("digit set has a single element"))?;
    let best = diffs
        .iter()
        .filter(|d| d.0.lo <= min_hi)
        .map(|d| &d.1)
        .min_by(|a, b| beta.compare(a, b))
        .expect("nonempty")
        .clone();
    let width = BigRational::new(BigInt::one(), BigInt::one() << 64);
    Ok(GapReport {
        gap: beta.enclose_to(&best, &width),
        coords: best,
        elements: items.len(),
    })
}
