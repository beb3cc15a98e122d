use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::{AlgebraicNumber, IntPoly, Interval};
use crate::{Error, Result};

/// Coordinates of a ring element.
///
/// `Int` holds the canonical integer vector in the power basis
/// `1, λ, …, λ^(d-1)` modulo a monic modulus. `Rat` holds the exact value
/// when the generator is a non-integral rational (no monic modulus exists).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coords {
    Int(SmallVec<[i64; 4]>),
    Rat(BigRational),
}

impl Coords {
    /// Exact rational polynomial in the generator with this value.
    pub fn to_qpoly(&self) -> Vec<BigRational> {
        match self {
            Coords::Int(v) => v
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
            Coords::Rat(r) => vec![r.clone()],
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coords::Int(v) => v.iter().all(|&c| c == 0),
            Coords::Rat(r) => r.is_zero(),
        }
    }
}

impl fmt::Display for Coords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coords::Int(v) => {
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            Coords::Rat(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug)]
enum Modulus {
    /// Tail `m_0 … m_(d-1)` of the monic modulus `x^d + Σ m_i x^i`.
    Monic {
        full: IntPoly,
        tail: Vec<i64>,
    },
    Rational,
}

#[derive(Debug)]
struct RingInner {
    modulus: Modulus,
    generator: AlgebraicNumber,
    table: OnceLock<PowerTable>,
}

/// The ring `Z[λ]` (or `Q` when `λ` is a non-integral rational) with a fixed
/// generator `λ`. Cheap to clone; shared by every element built from it.
#[derive(Clone, Debug)]
pub struct Ring(Arc<RingInner>);

/// Working precision of the cached generator enclosure.
const GENERATOR_BITS: u32 = 256;
const F64_TABLE_BITS: u32 = 80;

impl Ring {
    /// `Z[λ]` where `λ` is the root of the monic `modulus` described by
    /// `generator`. The generator's own polynomial must divide the modulus
    /// at `λ`, i.e. the modulus must vanish at `λ`.
    pub fn integral(modulus: IntPoly, generator: AlgebraicNumber) -> Result<Ring> {
        if !modulus.is_monic() {
            return Err(Error::domain(format!(
                "modulus {modulus} is not monic; canonical forms would need denominators"
            )));
        }
        let d = modulus.degree().unwrap();
        if d == 0 {
            return Err(Error::domain("modulus must have positive degree"));
        }
        if generator.sign_at(&modulus.to_rational()) != Ordering::Equal {
            return Err(Error::domain("generator is not a root of the modulus"));
        }
        let tail = modulus.coeffs()[..d]
            .iter()
            .map(|c| {
                c.to_i64()
                    .ok_or(Error::Overflow("modulus coefficient exceeds i64"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ring(Arc::new(RingInner {
            modulus: Modulus::Monic {
                full: modulus,
                tail,
            },
            generator: generator.refine_bits(GENERATOR_BITS),
            table: OnceLock::new(),
        })))
    }

    /// `Z[λ]` for the unique root of `modulus` inside `enclosure`.
    pub fn integral_root_in(modulus: IntPoly, enclosure: &Interval) -> Result<Ring> {
        let generator = AlgebraicNumber::from_root_in(&modulus, enclosure)?;
        Self::integral(modulus, generator)
    }

    /// The field `Q` with rational generator `λ`. Integer generators should
    /// use [`Ring::integral`] with modulus `x - λ` instead.
    pub fn rational(generator: BigRational) -> Ring {
        Ring(Arc::new(RingInner {
            modulus: Modulus::Rational,
            generator: AlgebraicNumber::from_rational(generator),
            table: OnceLock::new(),
        }))
    }

    pub fn generator(&self) -> &AlgebraicNumber {
        &self.0.generator
    }

    /// The monic modulus, if any.
    pub fn modulus(&self) -> Option<&IntPoly> {
        match &self.0.modulus {
            Modulus::Monic { full, .. } => Some(full),
            Modulus::Rational => None,
        }
    }

    /// Number of coordinates of an element (1 for the rational field).
    pub fn rank(&self) -> usize {
        match &self.0.modulus {
            Modulus::Monic { tail, .. } => tail.len(),
            Modulus::Rational => 1,
        }
    }

    pub fn same_as(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn zero(&self) -> Coords {
        match &self.0.modulus {
            Modulus::Monic { tail, .. } => Coords::Int(SmallVec::from_elem(0, tail.len())),
            Modulus::Rational => Coords::Rat(BigRational::zero()),
        }
    }

    pub fn integer(&self, n: i64) -> Coords {
        match &self.0.modulus {
            Modulus::Monic { tail, .. } => {
                let mut v = SmallVec::from_elem(0, tail.len());
                v[0] = n;
                Coords::Int(v)
            }
            Modulus::Rational => Coords::Rat(BigRational::from_integer(BigInt::from(n))),
        }
    }

    /// Exact rational constant; only representable in the rational field or
    /// when integral.
    pub fn rational_const(&self, r: &BigRational) -> Result<Coords> {
        match &self.0.modulus {
            Modulus::Rational => Ok(Coords::Rat(r.clone())),
            Modulus::Monic { .. } => {
                if !r.is_integer() {
                    return Err(Error::domain("non-integral rational is not in Z[λ]"));
                }
                let n = r
                    .to_integer()
                    .to_i64()
                    .ok_or(Error::Overflow("constant exceeds i64"))?;
                Ok(self.integer(n))
            }
        }
    }

    /// Validates and wraps an explicit coordinate vector.
    pub fn coords_from_ints(&self, v: &[i64]) -> Result<Coords> {
        match &self.0.modulus {
            Modulus::Monic { tail, .. } => {
                if v.len() > tail.len() {
                    // Allow over-long input and reduce it.
                    let raw = IntPoly::from_i64(v);
                    return Ok(self.reduce(&raw)?.coords);
                }
                let mut out: SmallVec<[i64; 4]> = SmallVec::from_slice(v);
                out.resize(tail.len(), 0);
                Ok(Coords::Int(out))
            }
            Modulus::Rational => {
                let raw = IntPoly::from_i64(v);
                let value = raw.eval(self.generator().as_rational().unwrap());
                Ok(Coords::Rat(value))
            }
        }
    }

    pub fn element(&self, coords: Coords) -> RingElement {
        RingElement {
            ring: self.clone(),
            coords,
        }
    }

    /// Canonical form of `raw(λ)`: remainder of `raw` modulo the monic
    /// modulus. Fails for a rational generator (non-monic minimal polynomial).
    pub fn reduce(&self, raw: &IntPoly) -> Result<RingElement> {
        match &self.0.modulus {
            Modulus::Monic { full, tail } => {
                let (_, r) = raw.div_rem_monic(full)?;
                let mut v: SmallVec<[i64; 4]> = SmallVec::from_elem(0, tail.len());
                for (i, c) in r.coeffs().iter().enumerate() {
                    v[i] = c
                        .to_i64()
                        .ok_or(Error::Overflow("reduced coordinate exceeds i64"))?;
                }
                Ok(self.element(Coords::Int(v)))
            }
            Modulus::Rational => Err(Error::domain(
                "minimal polynomial of a rational generator is not monic",
            )),
        }
    }

    pub fn add(&self, a: &Coords, b: &Coords) -> Result<Coords> {
        match (a, b) {
            (Coords::Int(x), Coords::Int(y)) => x
                .iter()
                .zip(y.iter())
                .map(|(p, q)| p.checked_add(*q).ok_or(Error::Overflow("coordinate add")))
                .collect::<Result<SmallVec<_>>>()
                .map(Coords::Int),
            (Coords::Rat(x), Coords::Rat(y)) => Ok(Coords::Rat(x + y)),
            _ => Err(Error::domain("mixed coordinate kinds")),
        }
    }

    pub fn neg(&self, a: &Coords) -> Result<Coords> {
        match a {
            Coords::Int(x) => x
                .iter()
                .map(|p| p.checked_neg().ok_or(Error::Overflow("coordinate neg")))
                .collect::<Result<SmallVec<_>>>()
                .map(Coords::Int),
            Coords::Rat(x) => Ok(Coords::Rat(-x)),
        }
    }

    pub fn sub(&self, a: &Coords, b: &Coords) -> Result<Coords> {
        self.add(a, &self.neg(b)?)
    }

    pub fn scale(&self, a: &Coords, k: i64) -> Result<Coords> {
        match a {
            Coords::Int(x) => x
                .iter()
                .map(|p| p.checked_mul(k).ok_or(Error::Overflow("coordinate scale")))
                .collect::<Result<SmallVec<_>>>()
                .map(Coords::Int),
            Coords::Rat(x) => Ok(Coords::Rat(x * BigRational::from_integer(BigInt::from(k)))),
        }
    }

    /// `λ · a`, reduced.
    pub fn mul_generator(&self, a: &Coords) -> Result<Coords> {
        match (&self.0.modulus, a) {
            (Modulus::Monic { tail, .. }, Coords::Int(x)) => {
                let d = tail.len();
                let top = x[d - 1];
                let mut out: SmallVec<[i64; 4]> = SmallVec::with_capacity(d);
                for i in 0..d {
                    let shifted = if i == 0 { 0 } else { x[i - 1] };
                    let v = top
                        .checked_mul(tail[i])
                        .and_then(|t| shifted.checked_sub(t))
                        .ok_or(Error::Overflow("multiplication by the generator"))?;
                    out.push(v);
                }
                Ok(Coords::Int(out))
            }
            (Modulus::Rational, Coords::Rat(x)) => {
                Ok(Coords::Rat(x * self.generator().as_rational().unwrap()))
            }
            _ => Err(Error::domain("coordinates do not belong to this ring")),
        }
    }

    /// `λ^k · a`.
    pub fn mul_generator_pow(&self, a: &Coords, k: usize) -> Result<Coords> {
        let mut x = a.clone();
        for _ in 0..k {
            x = self.mul_generator(&x)?;
        }
        Ok(x)
    }

    /// General product, reduced.
    pub fn mul(&self, a: &Coords, b: &Coords) -> Result<Coords> {
        match (a, b) {
            (Coords::Int(x), Coords::Int(_)) => {
                let mut acc = self.zero();
                let mut term = b.clone();
                for &c in x.iter() {
                    if c != 0 {
                        acc = self.add(&acc, &self.scale(&term, c)?)?;
                    }
                    term = self.mul_generator(&term)?;
                }
                Ok(acc)
            }
            (Coords::Rat(x), Coords::Rat(y)) => Ok(Coords::Rat(x * y)),
            _ => Err(Error::domain("mixed coordinate kinds")),
        }
    }

    fn table(&self) -> &PowerTable {
        self.0
            .table
            .get_or_init(|| PowerTable::new(self, F64_TABLE_BITS))
    }

    /// Exact sign of the real value of `a`.
    pub fn sign(&self, a: &Coords) -> Ordering {
        match a {
            Coords::Rat(r) => r.cmp(&BigRational::zero()),
            Coords::Int(_) => {
                if a.is_zero() {
                    return Ordering::Equal;
                }
                let f = self.table().enclose(a);
                if f.lo > 0 {
                    return Ordering::Greater;
                }
                if f.hi < 0 {
                    return Ordering::Less;
                }
                self.generator().sign_at(&a.to_qpoly())
            }
        }
    }

    /// Exact order of real values. Equal vectors are equal; distinct vectors
    /// are separated by interval evaluation, with a gcd test catching equal
    /// values under a non-minimal modulus.
    pub fn compare(&self, a: &Coords, b: &Coords) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        match (a, b) {
            (Coords::Rat(x), Coords::Rat(y)) => x.cmp(y),
            _ => match self.sub(a, b) {
                Ok(d) => self.sign(&d),
                Err(_) => {
                    let mut p = a.to_qpoly();
                    for (i, c) in b.to_qpoly().into_iter().enumerate() {
                        if i < p.len() {
                            p[i] -= c;
                        } else {
                            p.push(-c);
                        }
                    }
                    self.generator().sign_at(&p)
                }
            },
        }
    }

    /// Exact sign of `scale · value(a) + offset`.
    pub fn sign_affine(&self, a: &Coords, scale: &BigRational, offset: &BigRational) -> Ordering {
        let mut p: Vec<BigRational> = a.to_qpoly().iter().map(|c| c * scale).collect();
        if p.is_empty() {
            p.push(BigRational::zero());
        }
        p[0] += offset;
        self.generator().sign_at(&p)
    }

    /// Rational enclosure of the value of `a` using the cached generator
    /// enclosure.
    pub fn enclose(&self, a: &Coords) -> Interval {
        match a {
            Coords::Rat(r) => Interval::point(r.clone()),
            Coords::Int(_) => {
                let p = IntPoly::new(a.to_qpoly().iter().map(|c| c.to_integer()).collect());
                p.eval_interval(self.generator().enclosure())
            }
        }
    }

    /// Enclosure of `a` refined to width at most `width`.
    pub fn enclose_to(&self, a: &Coords, width: &BigRational) -> Interval {
        let mut g = self.generator().clone();
        let p = a.to_qpoly();
        loop {
            let iv = match a {
                Coords::Rat(r) => return Interval::point(r.clone()),
                Coords::Int(_) => {
                    super::number::clear_denominators(&p).eval_interval(g.enclosure())
                }
            };
            if &iv.width() <= width {
                return iv;
            }
            g = g.refine(
                &(g.enclosure().width() / BigRational::from_integer(BigInt::from(1u64 << 20))),
            );
        }
    }

    pub fn to_f64(&self, a: &Coords) -> f64 {
        if let Coords::Int(_) = a {
            let f = self.table().enclose(a);
            if f.lo != i128::MIN && f.hi != i128::MAX {
                return (f.lo as f64 * 0.5 + f.hi as f64 * 0.5) * (-(F64_TABLE_BITS as f64)).exp2();
            }
        }
        crate::numeric::rational_to_f64(&self.enclose(a).midpoint())
    }

    /// Sorts coordinates by exact real value.
    pub fn sort_by_value(&self, items: &mut [Coords]) {
        let table = PowerTable::new(self, 96);
        let mut keyed: Vec<(Fixed, Coords)> = items
            .iter()
            .map(|c| (table.enclose(c), c.clone()))
            .collect();
        keyed.sort_by(|(ea, a), (eb, b)| ea.order(eb).unwrap_or_else(|| self.compare(a, b)));
        for (slot, (_, c)) in items.iter_mut().zip(keyed) {
            *slot = c;
        }
    }
}

/// Element of a [`Ring`] with its coordinates.
#[derive(Clone, Debug)]
pub struct RingElement {
    ring: Ring,
    coords: Coords,
}

impl RingElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn into_coords(self) -> Coords {
        self.coords
    }

    /// Exact comparison of real values; fails on elements of different rings.
    pub fn compare(&self, other: &RingElement) -> Result<Ordering> {
        if !self.ring.same_as(&other.ring) {
            return Err(Error::domain("comparison across different rings"));
        }
        Ok(self.ring.compare(&self.coords, &other.coords))
    }

    pub fn to_f64(&self) -> f64 {
        self.ring.to_f64(&self.coords)
    }
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_as(&other.ring) && self.coords == other.coords
    }
}

impl Eq for RingElement {}

/// Canonical form of `raw(λ)` in `ring`.
pub fn reduce_mod_minpoly(raw: &IntPoly, ring: &Ring) -> Result<RingElement> {
    ring.reduce(raw)
}

/// Closed enclosure `[lo, hi] · 2^-bits` with `i128` endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fixed {
    pub lo: i128,
    pub hi: i128,
}

impl Fixed {
    /// Order when the enclosures are disjoint.
    pub fn order(&self, other: &Fixed) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if other.hi < self.lo {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// The enclosure as a rational interval.
    pub fn to_interval(&self, bits: u32) -> Interval {
        let den = BigInt::one() << bits;
        Interval::new(
            BigRational::new(BigInt::from(self.lo), den.clone()),
            BigRational::new(BigInt::from(self.hi), den),
        )
        .expect("lo <= hi")
    }

    /// `[floor(lo·2^-shift), floor(hi·2^-shift)]`.
    pub fn floor_shift(&self, shift: u32) -> (i128, i128) {
        (self.lo >> shift, self.hi >> shift)
    }
}

/// Fixed-point enclosures of `1, λ, …, λ^(d-1)` at `bits` fractional bits,
/// for fast bulk evaluation of element values.
#[derive(Clone, Debug)]
pub struct PowerTable {
    bits: u32,
    lo: Vec<BigInt>,
    hi: Vec<BigInt>,
    fast: Option<(Vec<i128>, Vec<i128>)>,
}

impl PowerTable {
    pub fn new(ring: &Ring, bits: u32) -> Self {
        let d = ring.rank();
        let g = ring.generator().refine_bits(bits + 8 * d as u32 + 16);
        let scale = BigRational::from_integer(BigInt::one() << bits);
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for j in 0..d {
            let pw = g.enclosure().pow(j as u32);
            lo.push((pw.lo() * &scale).floor().to_integer());
            hi.push((pw.hi() * &scale).ceil().to_integer());
        }
        let fast = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| Some((a.to_i128()?, b.to_i128()?)))
            .collect::<Option<Vec<_>>>()
            .map(|v| v.into_iter().unzip());
        PowerTable { bits, lo, hi, fast }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Enclosure of the value as big integers scaled by `2^bits`.
    pub fn enclose_big(&self, a: &Coords) -> (BigInt, BigInt) {
        match a {
            Coords::Int(v) => {
                let mut lo = BigInt::zero();
                let mut hi = BigInt::zero();
                for (j, &c) in v.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let c = BigInt::from(c);
                    if c.is_positive() {
                        lo += &c * &self.lo[j];
                        hi += &c * &self.hi[j];
                    } else {
                        lo += &c * &self.hi[j];
                        hi += &c * &self.lo[j];
                    }
                }
                (lo, hi)
            }
            Coords::Rat(r) => {
                use num_integer::Integer;
                let (fl, rem) = (r.numer() << self.bits).div_mod_floor(r.denom());
                let ce = if rem.is_zero() { fl.clone() } else { &fl + 1 };
                (fl, ce)
            }
        }
    }

    /// Enclosure with `i128` endpoints, saturating outward on overflow.
    pub fn enclose(&self, a: &Coords) -> Fixed {
        if let (Some((plo, phi)), Coords::Int(v)) = (&self.fast, a) {
            let mut lo = 0i128;
            let mut hi = 0i128;
            let mut ok = true;
            for (j, &c) in v.iter().enumerate() {
                let c = c as i128;
                let (x, y) = if c >= 0 {
                    (plo[j], phi[j])
                } else {
                    (phi[j], plo[j])
                };
                match (
                    c.checked_mul(x).and_then(|t| lo.checked_add(t)),
                    c.checked_mul(y).and_then(|t| hi.checked_add(t)),
                ) {
                    (Some(a), Some(b)) => {
                        lo = a;
                        hi = b;
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Fixed { lo, hi };
            }
        }
        let (lo, hi) = self.enclose_big(a);
        Fixed {
            lo: lo.to_i128().unwrap_or(i128::MIN),
            hi: hi.to_i128().unwrap_or(i128::MAX),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn golden_ring() -> Ring {
        Ring::integral_root_in(
            IntPoly::from_i64(&[-1, 1, 1]),
            &Interval::new(q(0, 1), q(1, 1)).unwrap(),
        )
        .unwrap()
    }

    fn q4_ring() -> Ring {
        Ring::integral_root_in(
            IntPoly::from_i64(&[1, -1, -1, -1, 1]),
            &Interval::new(q(0, 1), q(1, 1)).unwrap(),
        )
        .unwrap()
    }

    fn int(v: &[i64]) -> Coords {
        Coords::Int(SmallVec::from_slice(v))
    }

    #[test]
    fn reduce_modulus_to_zero() {
        let r = q4_ring();
        let m = r.modulus().unwrap().clone();
        assert!(r.reduce(&m).unwrap().coords().is_zero());
        let g = golden_ring();
        assert!(g
            .reduce(&IntPoly::from_i64(&[-1, 1, 1]))
            .unwrap()
            .coords()
            .is_zero());
    }

    #[test]
    fn lambda_fourth_power_long_division() {
        // Long division of x^4 by x^4 - x^3 - x^2 - x + 1 leaves
        // x^3 + x^2 + x - 1.
        let r = q4_ring();
        let e = r.reduce(&IntPoly::monomial(4)).unwrap();
        assert_eq!(e.coords(), &int(&[-1, 1, 1, 1]));
        assert_eq!(
            r.mul_generator_pow(&r.integer(1), 4).unwrap(),
            int(&[-1, 1, 1, 1])
        );
    }

    #[test]
    fn non_monic_is_rejected() {
        let r = Ring::rational(q(1, 3));
        assert!(r.reduce(&IntPoly::monomial(2)).is_err());
        assert!(Ring::integral_root_in(
            IntPoly::from_i64(&[-1, 3]),
            &Interval::new(q(0, 1), q(1, 1)).unwrap()
        )
        .is_err());
    }

    #[test]
    fn golden_comparisons() {
        let g = golden_ring();
        // 1 + λ vs λ² + 2λ: reduce λ² + 2λ = 1 + λ.
        let a = g.reduce(&IntPoly::from_i64(&[1, 1])).unwrap();
        let b = g.reduce(&IntPoly::from_i64(&[0, 2, 1])).unwrap();
        assert_eq!(a.compare(&b).unwrap(), Ordering::Equal);
        // 1 vs 2λ
        assert_eq!(g.compare(&int(&[1, 0]), &int(&[0, 2])), Ordering::Less);
        let other = golden_ring();
        assert!(a.compare(&other.element(int(&[1, 1]))).is_err());
    }

    #[test]
    fn non_minimal_modulus_equal_values() {
        // Modulus (x² + x - 1)(x - 2) = x³ - x² - 3x + 2 at the golden λ:
        // λ² and 1 - λ are distinct vectors with equal value.
        let m = &IntPoly::from_i64(&[-1, 1, 1]) * &IntPoly::from_i64(&[-2, 1]);
        let ring = Ring::integral_root_in(m, &Interval::new(q(0, 1), q(1, 1)).unwrap()).unwrap();
        assert_eq!(
            ring.compare(&int(&[0, 0, 1]), &int(&[1, -1, 0])),
            Ordering::Equal
        );
        assert_eq!(
            ring.compare(&int(&[0, 0, 1]), &int(&[1, -1, 1])),
            Ordering::Less
        );
    }

    #[test]
    fn fixed_enclosures_contain_value() {
        let r = q4_ring();
        let t = PowerTable::new(&r, 96);
        let c = int(&[16, -6, -20, -30]);
        let f = t.enclose(&c);
        let iv = r.enclose_to(&c, &q(1, 1 << 40));
        let scale = BigRational::from_integer(BigInt::one() << 96);
        let lo = BigRational::new(BigInt::from(f.lo), BigInt::one()) / &scale;
        let hi = BigRational::new(BigInt::from(f.hi), BigInt::one()) / &scale;
        assert!(lo <= *iv.hi() && *iv.lo() <= hi);
        assert!(f.hi - f.lo < 1 << 20);
    }

    /// Evaluates an integer polynomial at the golden λ with 60 significant
    /// digits using a Newton-refined decimal value of λ = (√5 - 1)/2.
    fn golden_high_precision(coeffs: &[i64]) -> BigRational {
        // λ to ~200 digits via rational Newton on x² + x - 1.
        let mut x = q(618, 1000);
        for _ in 0..10 {
            let f = &x * &x + &x - BigRational::one();
            let df = &x * BigRational::from_integer(2.into()) + BigRational::one();
            x = &x - f / df;
            // Truncate to keep numbers bounded.
            let s = BigInt::from(10).pow(220);
            x = BigRational::new(
                (&x * BigRational::from_integer(s.clone()))
                    .round()
                    .to_integer(),
                s,
            );
        }
        coeffs.iter().rev().fold(BigRational::zero(), |acc, &c| {
            acc * &x + BigRational::from_integer(c.into())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        // Canonical forms agree exactly when high-precision values agree.
        #[test]
        fn canonical_form_sound_for_signed_digit_polys(
            a in proptest::collection::vec(prop_oneof![Just(-1i64), Just(1i64)], 1..=11),
            b in proptest::collection::vec(prop_oneof![Just(-1i64), Just(1i64)], 1..=11),
        ) {
            let g = golden_ring();
            let ra = g.reduce(&IntPoly::from_i64(&a)).unwrap();
            let rb = g.reduce(&IntPoly::from_i64(&b)).unwrap();
            let va = golden_high_precision(&a);
            let vb = golden_high_precision(&b);
            let close = (va - vb).abs() < BigRational::new(1.into(), BigInt::from(10).pow(50));
            prop_assert_eq!(ra.coords() == rb.coords(), close);
        }

        #[test]
        fn compare_agrees_with_values(
            a in proptest::collection::vec(-20i64..20, 4),
            b in proptest::collection::vec(-20i64..20, 4),
            c in proptest::collection::vec(-20i64..20, 4),
        ) {
            let r = q4_ring();
            let (a, b, c) = (int(&a), int(&b), int(&c));
            let fa = r.to_f64(&a);
            let fb = r.to_f64(&b);
            let ab = r.compare(&a, &b);
            if (fa - fb).abs() > 1e-9 {
                prop_assert_eq!(ab, fa.partial_cmp(&fb).unwrap());
            }
            prop_assert_eq!(r.compare(&b, &a), ab.reverse());
            // Transitivity.
            let bc = r.compare(&b, &c);
            if ab != Ordering::Greater && bc != Ordering::Greater {
                prop_assert_ne!(r.compare(&a, &c), Ordering::Greater);
            }
        }
    }
}
