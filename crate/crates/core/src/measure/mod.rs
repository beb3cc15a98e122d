//! Finite-atom approximations of the invariant measure and exact masses of
//! dyadic boxes and balls.
//!
//! At depth `n` the measure is replaced by one atom per level-`n` class,
//! placed at the class translation `S_[u](0)` with the class weight.

mod cache;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebraic::{Coords, Fixed, Interval, PowerTable, Ring};
use crate::ifs::{enumerate_classes_with_budget, ClassTable, EqualRatioIfs, DEFAULT_ENTRY_BUDGET};
use crate::numeric::{compensated_sum, pow2_neg};
use crate::{Error, Result};

pub use cache::{
    cache_file_name, load_or_discretize, parse_atom_cache, write_atom_cache, CacheOutcome,
    CACHE_VERSION,
};

/// Fractional bits of the fixed-point atom enclosures.
pub const ATOM_BITS: u32 = 96;

/// Largest supported box level.
pub const MAX_LEVEL: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub position: Coords,
    /// Enclosure of the position, scaled by `2^ATOM_BITS`.
    pub enclosure: Fixed,
    /// Weight numerator over [`AtomMeasure::weight_den`].
    pub weight_num: u128,
}

/// Atoms sorted by position, with exact weights summing to 1.
#[derive(Clone, Debug)]
pub struct AtomMeasure {
    ring: Ring,
    depth: usize,
    weight_den: u128,
    atoms: Vec<Atom>,
    /// Numerator of the discretization radius `λ^n · radius_num / (1 - λ)`.
    radius_num: Coords,
    radius_upper: BigRational,
    digest: String,
}

/// Exact test of `λ^n · value(c) / (1 - λ) ≤ bound`.
fn scaled_le(ring: &Ring, n: usize, c: &Coords, bound: &BigRational) -> Result<bool> {
    // λ^n c - bound (1 - λ) ≤ 0
    let mut p: Vec<BigRational> = vec![BigRational::zero(); n];
    p.extend(c.to_qpoly());
    if p.len() < 2 {
        p.resize(2, BigRational::zero());
    }
    p[0] -= bound;
    p[1] += bound;
    Ok(ring.generator().sign_at(&p) != Ordering::Greater)
}

/// Numerators (over `1 - λ`) of the hull diameter and of the largest hull
/// endpoint modulus.
fn hull_spans(ifs: &EqualRatioIfs) -> Result<(Coords, Coords)> {
    let ring = ifs.ring();
    let (lo, hi) = ifs.extreme_translations();
    let diam = ring.sub(hi, lo)?;
    let neg_lo = ring.neg(lo)?;
    let reach = if ring.compare(hi, &neg_lo) == Ordering::Less {
        neg_lo
    } else {
        hi.clone()
    };
    Ok((diam, reach))
}

/// Smallest depth `n` with `λ^n · max(diam K, max |x|, x ∈ hull K) ≤ 2^(-m-2)`.
pub fn depth_for_scale(ifs: &EqualRatioIfs, m: u32) -> Result<usize> {
    let ring = ifs.ring();
    let (diam, reach) = hull_spans(ifs)?;
    let span = if ring.compare(&diam, &reach) == Ordering::Less {
        reach
    } else {
        diam
    };
    let bound = pow2_neg(m + 2);
    let mut n = 0;
    while !scaled_le(ring, n, &span, &bound)? {
        n += 1;
        if n > 10_000 {
            return Err(Error::domain("depth-for-scale search did not terminate"));
        }
    }
    Ok(n)
}

pub fn discretize(ifs: &EqualRatioIfs, n: usize) -> Result<AtomMeasure> {
    discretize_with_budget(ifs, n, DEFAULT_ENTRY_BUDGET)
}

pub fn discretize_with_budget(ifs: &EqualRatioIfs, n: usize, budget: usize) -> Result<AtomMeasure> {
    let table = enumerate_classes_with_budget(ifs, n, budget)?;
    AtomMeasure::from_table(ifs, table)
}

impl AtomMeasure {
    pub fn from_table(ifs: &EqualRatioIfs, table: ClassTable) -> Result<Self> {
        let depth = table.level();
        let weight_den = table.weight_den();
        let atoms = table
            .into_entries()
            .into_iter()
            .map(|e| (e.translation, e.weight_num))
            .collect();
        Self::from_parts(ifs, depth, weight_den, atoms)
    }

    pub(crate) fn from_parts(
        ifs: &EqualRatioIfs,
        depth: usize,
        weight_den: u128,
        raw: Vec<(Coords, u128)>,
    ) -> Result<Self> {
        let ring = ifs.ring().clone();
        let table = PowerTable::new(&ring, ATOM_BITS);
        let mut atoms: Vec<Atom> = raw
            .into_iter()
            .map(|(position, weight_num)| Atom {
                enclosure: table.enclose(&position),
                position,
                weight_num,
            })
            .collect();
        atoms.sort_unstable_by(|a, b| {
            a.enclosure
                .order(&b.enclosure)
                .unwrap_or_else(|| ring.compare(&a.position, &b.position))
        });
        let (_, reach) = hull_spans(ifs)?;
        let g = ring.generator().refine_bits(128);
        let lam_hi = g.enclosure().hi().clone();
        let reach_iv = ring.enclose_to(&reach, &pow2_neg(64));
        let one_minus_lo = BigRational::one() - &lam_hi;
        let radius_upper = if depth == 0 && reach.is_zero() {
            BigRational::zero()
        } else {
            num_traits::pow(lam_hi, depth) * reach_iv.hi().abs() / one_minus_lo
        };
        Ok(AtomMeasure {
            ring,
            depth,
            weight_den,
            atoms,
            radius_num: reach,
            radius_upper,
            digest: ifs.digest(),
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight_den(&self) -> u128 {
        self.weight_den
    }

    pub fn weight(&self, atom: &Atom) -> BigRational {
        BigRational::new(BigInt::from(atom.weight_num), BigInt::from(self.weight_den))
    }

    pub fn total_weight(&self) -> BigRational {
        let num: BigInt = self.atoms.iter().map(|a| BigInt::from(a.weight_num)).sum();
        BigRational::new(num, BigInt::from(self.weight_den))
    }

    pub fn enclosure(&self, atom: &Atom) -> Interval {
        atom.enclosure.to_interval(ATOM_BITS)
    }

    /// Certified upper bound on the discretization radius
    /// `ρ = λ^n · max |x|, x ∈ hull K`.
    pub fn radius_upper(&self) -> &BigRational {
        &self.radius_upper
    }

    /// Digest of the system the atoms were built from.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// Exact test of the scale-alignment guard `ρ ≤ 2^(-m-2)`.
    pub fn guard_holds(&self, m: u32) -> bool {
        scaled_le(&self.ring, self.depth, &self.radius_num, &pow2_neg(m + 2)).unwrap_or(false)
    }

    /// Exact sign of `position - x`.
    fn cmp_position(&self, atom: &Atom, x: &BigRational, x_fixed: &Fixed) -> Ordering {
        if let Some(o) = atom.enclosure.order(x_fixed) {
            return o;
        }
        self.ring
            .sign_affine(&atom.position, &BigRational::one(), &-x.clone())
    }

    /// Index of the first atom whose position is `>= x` (or `> x` when
    /// `strict`).
    fn lower_bound(&self, x: &BigRational, strict: bool) -> usize {
        let fx = fixed_of(x);
        self.atoms
            .partition_point(|a| match self.cmp_position(a, x, &fx) {
                Ordering::Less => true,
                Ordering::Equal => strict,
                Ordering::Greater => false,
            })
    }

    /// Box index `floor(position · 2^m)`.
    fn box_index(&self, atom: &Atom, m: u32) -> i64 {
        let shift = ATOM_BITS - m;
        let lo = (atom.enclosure.lo >> shift) as i64;
        let hi = (atom.enclosure.hi >> shift) as i64;
        if lo == hi {
            return lo;
        }
        // Largest v in [lo, hi] with v·2^-m <= position.
        let (mut a, mut b) = (lo, hi);
        while a < b {
            let mid = a + (b - a + 1) / 2;
            let edge = BigRational::new(BigInt::from(mid), BigInt::one() << m);
            let s = self
                .ring
                .sign_affine(&atom.position, &BigRational::one(), &-edge);
            if s == Ordering::Less {
                b = mid - 1;
            } else {
                a = mid;
            }
        }
        a
    }
}

fn fixed_of(x: &BigRational) -> Fixed {
    let s = x * BigRational::from_integer(BigInt::one() << ATOM_BITS);
    Fixed {
        lo: s.floor().to_integer().to_i128().unwrap_or(i128::MIN),
        hi: s.ceil().to_integer().to_i128().unwrap_or(i128::MAX),
    }
}

/// Exact masses of the half-open boxes `[v 2^-m, (v+1) 2^-m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxMasses {
    level: u32,
    weight_den: u128,
    /// `(v, numerator)` sorted by `v`, nonzero only.
    boxes: Vec<(i64, u128)>,
}

impl BoxMasses {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn weight_den(&self) -> u128 {
        self.weight_den
    }

    pub fn raw(&self) -> &[(i64, u128)] {
        &self.boxes
    }

    pub fn masses(&self) -> impl Iterator<Item = (i64, BigRational)> + '_ {
        self.boxes.iter().map(|&(v, n)| {
            (
                v,
                BigRational::new(BigInt::from(n), BigInt::from(self.weight_den)),
            )
        })
    }

    pub fn mass(&self, v: i64) -> BigRational {
        let n = self
            .boxes
            .binary_search_by_key(&v, |b| b.0)
            .map(|i| self.boxes[i].1)
            .unwrap_or(0);
        BigRational::new(BigInt::from(n), BigInt::from(self.weight_den))
    }

    pub fn total(&self) -> BigRational {
        let n: BigInt = self.boxes.iter().map(|b| BigInt::from(b.1)).sum();
        BigRational::new(n, BigInt::from(self.weight_den))
    }

    /// Masses at a coarser level `m' <= m` by summing children.
    pub fn coarsen(&self, level: u32) -> Result<BoxMasses> {
        if level > self.level {
            return Err(Error::domain("cannot coarsen to a finer level"));
        }
        let shift = self.level - level;
        let mut boxes: Vec<(i64, u128)> = Vec::new();
        for &(v, n) in &self.boxes {
            let p = v >> shift;
            match boxes.last_mut() {
                Some(last) if last.0 == p => last.1 += n,
                _ => boxes.push((p, n)),
            }
        }
        Ok(BoxMasses {
            level,
            weight_den: self.weight_den,
            boxes,
        })
    }

    /// `ln Σ_Q mass(Q)^q`, evaluated from the exact masses.
    pub fn ln_moment(&self, q: f64) -> f64 {
        let logs: Vec<f64> = self.boxes.iter().map(|b| q * ln_u128(b.1)).collect();
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let s = compensated_sum(logs.iter().map(|l| (l - max).exp()));
        s.ln() + max - q * ln_u128(self.weight_den)
    }
}

fn ln_u128(x: u128) -> f64 {
    if x >> 100 == 0 {
        (x as f64).ln()
    } else {
        let shift = 128 - x.leading_zeros() - 64;
        ((x >> shift) as f64).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Box masses at level `m`, enforcing the scale-alignment guard.
pub fn box_masses(measure: &AtomMeasure, m: u32) -> Result<BoxMasses> {
    if !measure.guard_holds(m) {
        return Err(Error::domain(format!(
            "discretization radius at depth {} exceeds 2^-{} (scale-alignment guard)",
            measure.depth(),
            m + 2
        )));
    }
    box_masses_unguarded(measure, m)
}

/// Box masses at level `m` without the scale-alignment guard.
pub fn box_masses_unguarded(measure: &AtomMeasure, m: u32) -> Result<BoxMasses> {
    if m > MAX_LEVEL {
        return Err(Error::domain(format!("box level {m} exceeds {MAX_LEVEL}")));
    }
    let mut boxes: Vec<(i64, u128)> = Vec::new();
    for atom in measure.atoms() {
        let v = measure.box_index(atom, m);
        match boxes.last_mut() {
            Some(last) if last.0 == v => last.1 += atom.weight_num,
            Some(last) if last.0 > v => {
                return Err(Error::domain("atoms are not sorted by position"));
            }
            _ => boxes.push((v, atom.weight_num)),
        }
    }
    Ok(BoxMasses {
        level: m,
        weight_den: measure.weight_den(),
        boxes,
    })
}

/// Mass of the closed ball `[center - radius, center + radius]`.
pub fn ball_mass(
    measure: &AtomMeasure,
    center: &BigRational,
    radius: &BigRational,
) -> Result<BigRational> {
    if !radius.is_positive() {
        return Err(Error::domain("ball radius must be positive"));
    }
    let a = measure.lower_bound(&(center - radius), false);
    let b = measure.lower_bound(&(center + radius), true);
    let num: u128 = measure.atoms()[a..b.max(a)]
        .iter()
        .map(|x| x.weight_num)
        .sum();
    Ok(BigRational::new(
        BigInt::from(num),
        BigInt::from(measure.weight_den()),
    ))
}

/// One row of a local-dimension scan.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalDimensionRow {
    pub m: u32,
    pub depth: usize,
    /// `-log2 μ(B(x, 2^-m)) / m`; `None` when the ball carries no mass.
    pub estimate: Option<f64>,
}

/// `-log2 μ(B(x, 2^-m)) / m` for each `m`, each from the depth-for-scale
/// discretization.
pub fn local_dimension_estimate(
    ifs: &EqualRatioIfs,
    x: &BigRational,
    scales: &[u32],
) -> Result<Vec<LocalDimensionRow>> {
    let mut cached: Option<AtomMeasure> = None;
    let mut rows = Vec::with_capacity(scales.len());
    for &m in scales {
        if m == 0 {
            return Err(Error::domain("scale m must be positive"));
        }
        let depth = depth_for_scale(ifs, m)?;
        if cached.as_ref().map(|c| c.depth()) != Some(depth) {
            cached = Some(discretize(ifs, depth)?);
        }
        let measure = cached.as_ref().unwrap();
        let mass = ball_mass(measure, x, &pow2_neg(m))?;
        let estimate = if mass.is_zero() {
            None
        } else {
            Some(-crate::numeric::ln_rational(&mass) / std::f64::consts::LN_2 / m as f64)
        };
        rows.push(LocalDimensionRow { m, depth, estimate });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cantor_depth_two_atoms() {
        let ifs = EqualRatioIfs::cantor();
        let m = discretize(&ifs, 2).unwrap();
        let pos: Vec<BigRational> = m
            .atoms()
            .iter()
            .map(|a| m.ring().enclose(&a.position).lo().clone())
            .collect();
        assert_eq!(pos, vec![q(0, 1), q(2, 9), q(2, 3), q(8, 9)]);
        assert!(m.atoms().iter().all(|a| m.weight(a) == q(1, 4)));
        let boxes = box_masses_unguarded(&m, 2).unwrap();
        assert_eq!(
            boxes.masses().collect::<Vec<_>>(),
            vec![(0, q(1, 2)), (2, q(1, 4)), (3, q(1, 4))]
        );
        assert_eq!(ball_mass(&m, &q(0, 1), &q(1, 4)).unwrap(), q(1, 2));
        assert_eq!(ball_mass(&m, &q(5, 1), &q(1, 4)).unwrap(), q(0, 1));
        assert_eq!(ball_mass(&m, &q(1, 2), &q(1, 1)).unwrap(), q(1, 1));
        assert!(ball_mass(&m, &q(0, 1), &q(0, 1)).is_err());
        // The guard needs ρ = 1/9 <= 2^-4: fails at m = 2.
        assert!(box_masses(&m, 2).is_err());
    }

    #[test]
    fn ball_boundaries_are_closed() {
        let m = discretize(&EqualRatioIfs::cantor(), 2).unwrap();
        // [2/9 - 2/9, 2/9 + 2/9] holds 0 and 2/9, not 2/3.
        assert_eq!(ball_mass(&m, &q(2, 9), &q(2, 9)).unwrap(), q(1, 2));
        assert_eq!(ball_mass(&m, &q(4, 9), &q(2, 9)).unwrap(), q(1, 2));
        assert_eq!(
            ball_mass(&m, &q(4, 9), &(q(2, 9) - q(1, 1000))).unwrap(),
            q(0, 1)
        );
    }

    #[test]
    fn depth_zero_is_a_point_mass() {
        for ifs in [
            EqualRatioIfs::cantor(),
            EqualRatioIfs::golden_bernoulli().unwrap(),
        ] {
            let m = discretize(&ifs, 0).unwrap();
            assert_eq!(m.len(), 1);
            for level in [0, 3, 10] {
                let b = box_masses_unguarded(&m, level).unwrap();
                assert_eq!(b.len(), 1);
                assert!(b.total().is_one());
            }
        }
    }

    #[test]
    fn golden_depth_three() {
        let ifs = EqualRatioIfs::golden_bernoulli().unwrap();
        let m = discretize(&ifs, 3).unwrap();
        assert_eq!(m.len(), 7);
        let zero = m.atoms().iter().find(|a| a.position.is_zero()).unwrap();
        assert_eq!(m.weight(zero), q(1, 4));
        for w in m.atoms().windows(2) {
            assert_eq!(
                m.ring().compare(&w[0].position, &w[1].position),
                Ordering::Less
            );
        }
    }

    #[test]
    fn edge_atoms_go_right() {
        // Lebesgue atoms k/2^n sit exactly on box edges.
        let m = discretize(&EqualRatioIfs::lebesgue(), 4).unwrap();
        let b = box_masses_unguarded(&m, 3).unwrap();
        assert_eq!(b.len(), 8);
        assert!(b.masses().all(|(_, w)| w == q(1, 8)));
        assert_eq!(b.raw().first().unwrap().0, 0);
    }

    #[test]
    fn depth_rule_and_guard_agree() {
        for (ifs, hull_from_zero) in [
            (EqualRatioIfs::cantor(), true),
            (EqualRatioIfs::lebesgue(), true),
            (EqualRatioIfs::golden_bernoulli().unwrap(), false),
        ] {
            for m in [1u32, 4, 8] {
                let n = depth_for_scale(&ifs, m).unwrap();
                assert!(discretize(&ifs, n).unwrap().guard_holds(m));
                // With hull [0, b] the diameter equals the radius numerator.
                if n > 0 && hull_from_zero {
                    assert!(!discretize(&ifs, n - 1).unwrap().guard_holds(m));
                }
            }
        }
        // Cantor: 3^-n <= 2^-18 first at n = 12.
        assert_eq!(depth_for_scale(&EqualRatioIfs::cantor(), 16).unwrap(), 12);
        assert_eq!(depth_for_scale(&EqualRatioIfs::lebesgue(), 14).unwrap(), 16);
    }

    #[test]
    fn moment_of_uniform_boxes() {
        let m = discretize(&EqualRatioIfs::lebesgue(), 10).unwrap();
        let b = box_masses(&m, 8).unwrap();
        let q2 = b.ln_moment(2.0);
        assert!((q2 - (-8.0 * std::f64::consts::LN_2)).abs() < 1e-12);
        assert!(b.ln_moment(1.0).abs() < 1e-15);
    }
}
