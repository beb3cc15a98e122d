//! Equal-ratio iterated function systems `S_i(x) = λx + d_i` on the line.

mod classes;
mod parse;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use sha2::{Digest, Sha256};

use crate::algebraic::{lambda_ring, Coords, IntPoly, Interval, Ring};
use crate::{Error, Result};

pub use classes::{
    class_members, enumerate_classes, enumerate_classes_with_budget, find_heavy_class,
    heavy_inequality, ClassEntry, ClassTable, HeavyClass, DEFAULT_ENTRY_BUDGET,
    MEMBER_ENUMERATION_LIMIT,
};
pub use parse::parse_ifs;

/// A system of maps `S_i(x) = λx + d_i`, `i = 1..ℓ`, with probability weights.
#[derive(Clone, Debug)]
pub struct EqualRatioIfs {
    ring: Ring,
    translations: Vec<Coords>,
    weights: Vec<BigRational>,
    /// Common denominator `D` of the weights and the numerators `D·p_i`.
    weight_den: u128,
    weight_nums: Vec<u128>,
}

/// `x ↦ λ^length · x + translation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineWordMap {
    pub length: usize,
    pub translation: Coords,
}

impl EqualRatioIfs {
    pub fn new(ring: Ring, translations: Vec<Coords>, weights: Vec<BigRational>) -> Result<Self> {
        let g = ring.generator();
        if g.cmp_rational(&BigRational::zero()) != Ordering::Greater
            || g.cmp_rational(&BigRational::one()) != Ordering::Less
        {
            return Err(Error::domain("contraction ratio must lie in (0, 1)"));
        }
        if translations.len() < 2 {
            return Err(Error::domain("need at least two maps"));
        }
        if translations.len() != weights.len() {
            return Err(Error::domain(format!(
                "{} translations but {} weights",
                translations.len(),
                weights.len()
            )));
        }
        let zero = ring.zero();
        for t in &translations {
            if std::mem::discriminant(t) != std::mem::discriminant(&zero) {
                return Err(Error::domain("translation does not belong to the ring"));
            }
            if let Coords::Int(v) = t {
                if v.len() != ring.rank() {
                    return Err(Error::domain(
                        "translation has the wrong number of coordinates",
                    ));
                }
            }
        }
        for i in 0..translations.len() {
            for j in 0..i {
                if ring.compare(&translations[i], &translations[j]) == Ordering::Equal {
                    return Err(Error::domain(format!(
                        "maps {} and {} coincide",
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::domain("weights must be positive"));
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::domain(format!("weights sum to {total}, not 1")));
        }
        let den = weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let weight_den = den.to_u128().ok_or(Error::Overflow("weight denominator"))?;
        let weight_nums = weights
            .iter()
            .map(|w| {
                (w * BigRational::from_integer(den.clone()))
                    .to_integer()
                    .to_u128()
                    .ok_or(Error::Overflow("weight numerator"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EqualRatioIfs {
            ring,
            translations,
            weights,
            weight_den,
            weight_nums,
        })
    }

    /// Equal weights `1/ℓ`.
    pub fn uniform(ring: Ring, translations: Vec<Coords>) -> Result<Self> {
        let l = translations.len().max(1);
        let w = vec![BigRational::new(BigInt::one(), BigInt::from(l)); translations.len()];
        Self::new(ring, translations, w)
    }

    /// `{λx - 1, λx + 1}` with weights `(1/2, 1/2)`.
    pub fn bernoulli(ring: Ring) -> Result<Self> {
        let t = vec![ring.integer(-1), ring.integer(1)];
        Self::uniform(ring, t)
    }

    /// Bernoulli convolution for `λ_n = 1/β_n`, the reciprocal of the largest
    /// root of `Q_n`.
    pub fn salem_bernoulli(n: usize) -> Result<Self> {
        Self::bernoulli(lambda_ring(n)?)
    }

    /// Bernoulli convolution for the golden `λ`, root of `x² + x - 1`.
    pub fn golden_bernoulli() -> Result<Self> {
        let ring =
            Ring::integral_root_in(IntPoly::from_i64(&[-1, 1, 1]), &Interval::from_ints(0, 1)?)?;
        Self::bernoulli(ring)
    }

    /// `{λx + d_i}` with rational `λ` and translations, uniform weights.
    pub fn rational(ratio: BigRational, translations: &[BigRational]) -> Result<Self> {
        let ring = Ring::rational(ratio);
        let t = translations
            .iter()
            .map(|d| ring.rational_const(d))
            .collect::<Result<Vec<_>>>()?;
        Self::uniform(ring, t)
    }

    /// `{x/3, x/3 + 2/3}` with weights `(1/2, 1/2)`.
    pub fn cantor() -> Self {
        Self::rational(
            BigRational::new(1.into(), 3.into()),
            &[BigRational::zero(), BigRational::new(2.into(), 3.into())],
        )
        .expect("valid system")
    }

    /// `{x/2, x/2 + 1/2}` with weights `(1/2, 1/2)`; the invariant measure is
    /// Lebesgue measure on `[0, 1]`.
    pub fn lebesgue() -> Self {
        Self::rational(
            BigRational::new(1.into(), 2.into()),
            &[BigRational::zero(), BigRational::new(1.into(), 2.into())],
        )
        .expect("valid system")
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.translations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.translations.is_empty()
    }

    pub fn translations(&self) -> &[Coords] {
        &self.translations
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub(crate) fn weight_den(&self) -> u128 {
        self.weight_den
    }

    pub(crate) fn weight_nums(&self) -> &[u128] {
        &self.weight_nums
    }

    pub fn has_uniform_weights(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    /// Translations of least and greatest real value.
    pub fn extreme_translations(&self) -> (&Coords, &Coords) {
        let mut lo = &self.translations[0];
        let mut hi = lo;
        for t in &self.translations[1..] {
            if self.ring.compare(t, lo) == Ordering::Less {
                lo = t;
            }
            if self.ring.compare(t, hi) == Ordering::Greater {
                hi = t;
            }
        }
        (lo, hi)
    }

    /// Enclosure, of width at most `width`, of the convex hull
    /// `[d_min/(1-λ), d_max/(1-λ)]` of the attractor.
    pub fn attractor_interval(&self, width: &BigRational) -> Interval {
        let (lo, hi) = self.extreme_translations();
        let mut w = width / BigRational::from_integer(BigInt::from(8));
        loop {
            let a = self.fixed_point_enclosure(lo, &w);
            let b = self.fixed_point_enclosure(hi, &w);
            let iv = Interval::new(a.lo().clone(), b.hi().clone()).expect("ordered hull");
            let inner_ok = &(a.width() + b.width()) <= width;
            if inner_ok {
                return iv;
            }
            w /= BigRational::from_integer(BigInt::from(16));
        }
    }

    /// Enclosure of the fixed point `d/(1-λ)` of `x ↦ λx + d`.
    pub fn fixed_point_enclosure(&self, d: &Coords, width: &BigRational) -> Interval {
        let g = self.ring.generator();
        if let (Some(l), Coords::Rat(r)) = (g.as_rational(), d) {
            return Interval::point(r / (BigRational::one() - l));
        }
        let mut eps = width.clone();
        loop {
            let num = self.ring.enclose_to(d, &eps);
            let one_minus = &Interval::point(BigRational::one()) - &self.generator_enclosure(&eps);
            if let Ok(iv) = num.div(&one_minus) {
                if &iv.width() <= width {
                    return iv;
                }
            }
            eps /= BigRational::from_integer(BigInt::from(16));
        }
    }

    fn generator_enclosure(&self, width: &BigRational) -> Interval {
        self.ring.generator().refine(width).enclosure().clone()
    }

    /// Composition `S_{w_1} ∘ … ∘ S_{w_n}`; indices are 1-based.
    pub fn compose_word(&self, word: &[usize]) -> Result<AffineWordMap> {
        let mut t = self.ring.zero();
        for &i in word.iter().rev() {
            let d = self.translation(i)?;
            t = self.ring.add(&self.ring.mul_generator(&t)?, d)?;
        }
        Ok(AffineWordMap {
            length: word.len(),
            translation: t,
        })
    }

    fn translation(&self, i: usize) -> Result<&Coords> {
        if i == 0 || i > self.len() {
            return Err(Error::domain(format!(
                "map index {i} outside 1..={}",
                self.len()
            )));
        }
        Ok(&self.translations[i - 1])
    }

    /// Product of the weights along `word`.
    pub fn word_weight(&self, word: &[usize]) -> Result<BigRational> {
        let mut w = BigRational::one();
        for &i in word {
            self.translation(i)?;
            w *= &self.weights[i - 1];
        }
        Ok(w)
    }

    /// Stable identifier of the ratio: `floor(λ · 2^64)` together with the
    /// modulus (or the exact rational ratio).
    fn ratio_key(&self) -> String {
        let g = self.ring.generator();
        if let Some(r) = g.as_rational() {
            return format!("rational {r}");
        }
        let scale = BigRational::from_integer(BigInt::one() << 64);
        let mut a = g.clone();
        let mut bits = 80;
        loop {
            let lo = (a.enclosure().lo() * &scale).floor();
            let hi = (a.enclosure().hi() * &scale).floor();
            if lo == hi {
                return format!(
                    "root {} floor {}",
                    self.ring
                        .modulus()
                        .expect("irrational generator has a modulus"),
                    lo.to_integer()
                );
            }
            a = a.refine_bits(bits);
            bits *= 2;
        }
    }

    /// SHA-256 over the ratio, translations and weights.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.ratio_key().as_bytes());
        for (t, w) in self.translations.iter().zip(&self.weights) {
            h.update(format!("|{t};{w}").as_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Line-oriented description accepted by [`parse_ifs`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let g = self.ring.generator();
        match (self.ring.modulus(), g.as_rational()) {
            (None, Some(r)) => out.push_str(&format!("ratio: rational {r}\n")),
            (Some(m), _) => {
                let c: Vec<String> = m.coeffs().iter().map(|c| c.to_string()).collect();
                out.push_str(&format!("modulus: {}\n", c.join(" ")));
                let e = g.enclosure();
                out.push_str(&format!("ratio: root in ({}, {})\n", e.lo(), e.hi()));
            }
            (None, None) => unreachable!("rings without modulus have rational generators"),
        }
        for t in &self.translations {
            match t {
                Coords::Int(v) => {
                    let c: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                    out.push_str(&format!("map: {}\n", c.join(" ")));
                }
                Coords::Rat(r) => out.push_str(&format!("map: value {r}\n")),
            }
        }
        for w in &self.weights {
            out.push_str(&format!("weight: {w}\n"));
        }
        out
    }
}

/// Renders a word as a digit string when every index is below 10, otherwise
/// as a comma-separated list.
pub fn format_word(word: &[usize]) -> String {
    if word.iter().all(|&i| i < 10) {
        word.iter().map(|i| char::from(b'0' + *i as u8)).collect()
    } else {
        let parts: Vec<String> = word.iter().map(|i| i.to_string()).collect();
        parts.join(",")
    }
}

/// Inverse of [`format_word`].
pub fn parse_word(text: &str) -> Result<Vec<usize>> {
    let s = text.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(',') {
        return s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::domain(format!("bad word index {p:?}")))
            })
            .collect();
    }
    s.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as usize)
                .ok_or_else(|| Error::domain(format!("bad word character {c:?}")))
        })
        .collect()
}
