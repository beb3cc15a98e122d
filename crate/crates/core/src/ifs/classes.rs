use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use super::EqualRatioIfs;
use crate::algebraic::Coords;
use crate::{Error, Result};

/// Default cap on the number of distinct translations held at one level.
pub const DEFAULT_ENTRY_BUDGET: usize = 100_000_000;

/// `class_members` enumerates at most `2^MEMBER_ENUMERATION_LIMIT` words.
pub const MEMBER_ENUMERATION_LIMIT: u32 = 24;

/// One equivalence class `[I]` of level-`k` words sharing a translation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassEntry {
    pub translation: Coords,
    /// `#[I]`.
    pub multiplicity: u128,
    /// Numerator of the class weight over [`ClassTable::weight_den`].
    pub weight_num: u128,
}

/// Level-`k` classes sorted by canonical coordinate vector.
#[derive(Clone, Debug)]
pub struct ClassTable {
    level: usize,
    weight_den: u128,
    entries: Vec<ClassEntry>,
}

impl ClassTable {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ClassEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ClassEntry> {
        self.entries
    }

    /// `D^k`, where `D` is the least common denominator of the map weights.
    pub fn weight_den(&self) -> u128 {
        self.weight_den
    }

    pub fn weight(&self, e: &ClassEntry) -> BigRational {
        BigRational::new(BigInt::from(e.weight_num), BigInt::from(self.weight_den))
    }

    pub fn get(&self, translation: &Coords) -> Option<&ClassEntry> {
        self.entries
            .binary_search_by(|e| e.translation.cmp(translation))
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn total_multiplicity(&self) -> u128 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn total_weight(&self) -> BigRational {
        let num: BigInt = self
            .entries
            .iter()
            .map(|e| BigInt::from(e.weight_num))
            .sum();
        BigRational::new(num, BigInt::from(self.weight_den))
    }

    pub fn max_weight(&self) -> BigRational {
        let m = self.entries.iter().map(|e| e.weight_num).max().unwrap_or(0);
        BigRational::new(BigInt::from(m), BigInt::from(self.weight_den))
    }
}

pub fn enumerate_classes(ifs: &EqualRatioIfs, k: usize) -> Result<ClassTable> {
    enumerate_classes_with_budget(ifs, k, DEFAULT_ENTRY_BUDGET)
}

/// Builds the level-`k` table by prepending maps one level at a time
/// (`t ← λt + d_i`) and merging equal canonical vectors.
pub fn enumerate_classes_with_budget(
    ifs: &EqualRatioIfs,
    k: usize,
    budget: usize,
) -> Result<ClassTable> {
    if ifs.ring().modulus().is_none() {
        if let Some(table) = rational_classes(ifs, k, budget)? {
            return Ok(table);
        }
    }
    let ring = ifs.ring();
    let l = ifs.len() as u128;
    let nums = ifs.weight_nums();
    let den = ifs.weight_den();
    let mut map: FxHashMap<Coords, (u128, u128)> = FxHashMap::default();
    map.insert(ring.zero(), (1, 1));
    let mut words: u128 = 1;
    let mut weight_den: u128 = 1;
    for level in 1..=k {
        words = words
            .checked_mul(l)
            .ok_or(Error::Overflow("word count exceeds u128"))?;
        weight_den = weight_den
            .checked_mul(den)
            .ok_or(Error::Overflow("weight denominator exceeds u128"))?;
        let mut next: FxHashMap<Coords, (u128, u128)> = FxHashMap::default();
        next.reserve(
            map.len()
                .saturating_mul(ifs.len())
                .min(budget.saturating_add(1)),
        );
        for (t, (m, w)) in map {
            let scaled = ring.mul_generator(&t)?;
            for (d, &p) in ifs.translations().iter().zip(nums) {
                let key = ring.add(&scaled, d)?;
                let wp = w
                    .checked_mul(p)
                    .ok_or(Error::Overflow("class weight exceeds u128"))?;
                let slot = next.entry(key).or_insert((0, 0));
                slot.0 += m;
                slot.1 += wp;
            }
            if next.len() > budget {
                return Err(Error::Budget {
                    level,
                    entries: next.len(),
                    budget,
                });
            }
        }
        let (mult, weight) = next
            .values()
            .fold((0u128, 0u128), |(a, b), (m, w)| (a + m, b + w));
        if mult != words || weight != weight_den {
            return Err(Error::domain(format!(
                "conservation failed at level {level}: {mult}/{words} words, weight {weight}/{weight_den}"
            )));
        }
        map = next;
    }
    let mut entries: Vec<ClassEntry> = map
        .into_iter()
        .map(|(translation, (multiplicity, weight_num))| ClassEntry {
            translation,
            multiplicity,
            weight_num,
        })
        .collect();
    entries.sort_unstable_by(|a, b| a.translation.cmp(&b.translation));
    Ok(ClassTable {
        level: k,
        weight_den,
        entries,
    })
}

/// Rational ratio `a/b` and translations `c_i/E`: at level `j` a
/// translation is `N / (E b^j)` with `N ← aN + c_i b^(j+1)`. Runs on `i128`
/// numerators; returns `None` if they would overflow.
fn rational_classes(ifs: &EqualRatioIfs, k: usize, budget: usize) -> Result<Option<ClassTable>> {
    let ring = ifs.ring();
    let lam = ring.generator().as_rational().expect("rational generator");
    let rats: Vec<&BigRational> = ifs
        .translations()
        .iter()
        .map(|t| match t {
            Coords::Rat(r) => r,
            Coords::Int(_) => unreachable!("rational ring"),
        })
        .collect();
    let e = rats.iter().fold(BigInt::from(1), |acc, r| {
        num_integer::Integer::lcm(&acc, r.denom())
    });
    let (Some(a), Some(b), Some(e_small)) =
        (lam.numer().to_i128(), lam.denom().to_i128(), e.to_i128())
    else {
        return Ok(None);
    };
    let Some(c) = rats
        .iter()
        .map(|r| {
            (*r * BigRational::from_integer(e.clone()))
                .to_integer()
                .to_i128()
        })
        .collect::<Option<Vec<i128>>>()
    else {
        return Ok(None);
    };
    let l = ifs.len() as u128;
    let nums = ifs.weight_nums();
    let den = ifs.weight_den();
    let mut map: FxHashMap<i128, (u128, u128)> = FxHashMap::default();
    map.insert(0, (1, 1));
    let mut words: u128 = 1;
    let mut weight_den: u128 = 1;
    let mut b_pow: i128 = 1;
    for level in 1..=k {
        words = words
            .checked_mul(l)
            .ok_or(Error::Overflow("word count exceeds u128"))?;
        weight_den = weight_den
            .checked_mul(den)
            .ok_or(Error::Overflow("weight denominator exceeds u128"))?;
        let Some(next_pow) = b_pow.checked_mul(b) else {
            return Ok(None);
        };
        b_pow = next_pow;
        let Some(shift) = c
            .iter()
            .map(|ci| ci.checked_mul(b_pow))
            .collect::<Option<Vec<i128>>>()
        else {
            return Ok(None);
        };
        let mut next: FxHashMap<i128, (u128, u128)> = FxHashMap::default();
        next.reserve(
            map.len()
                .saturating_mul(ifs.len())
                .min(budget.saturating_add(1)),
        );
        for (t, (m, w)) in map {
            let Some(scaled) = t.checked_mul(a) else {
                return Ok(None);
            };
            for (s, &p) in shift.iter().zip(nums) {
                let Some(key) = scaled.checked_add(*s) else {
                    return Ok(None);
                };
                let wp = w
                    .checked_mul(p)
                    .ok_or(Error::Overflow("class weight exceeds u128"))?;
                let slot = next.entry(key).or_insert((0, 0));
                slot.0 += m;
                slot.1 += wp;
            }
            if next.len() > budget {
                return Err(Error::Budget {
                    level,
                    entries: next.len(),
                    budget,
                });
            }
        }
        map = next;
    }
    let scale = BigInt::from(e_small) * BigInt::from(b_pow);
    let mut raw: Vec<(i128, (u128, u128))> = map.into_iter().collect();
    // A shared positive denominator makes numerator order the value order.
    raw.sort_unstable_by_key(|r| r.0);
    let entries: Vec<ClassEntry> = raw
        .into_iter()
        .map(|(n, (multiplicity, weight_num))| ClassEntry {
            translation: Coords::Rat(BigRational::new(BigInt::from(n), scale.clone())),
            multiplicity,
            weight_num,
        })
        .collect();
    let table = ClassTable {
        level: k,
        weight_den,
        entries,
    };
    if table.total_multiplicity() != words
        || table.entries.iter().map(|e| e.weight_num).sum::<u128>() != weight_den
    {
        return Err(Error::domain(
            "conservation failed in the rational class table",
        ));
    }
    Ok(Some(table))
}

/// All words of length `k` whose composed translation equals `target`, in
/// lexicographic order.
pub fn class_members(ifs: &EqualRatioIfs, k: usize, target: &Coords) -> Result<Vec<Vec<usize>>> {
    let l = ifs.len();
    let total = (l as f64).powi(k as i32);
    if total > 2f64.powi(MEMBER_ENUMERATION_LIMIT as i32) {
        return Err(Error::domain(format!(
            "{l}^{k} words exceed the brute-force bound 2^{MEMBER_ENUMERATION_LIMIT}"
        )));
    }
    let ring = ifs.ring();
    // terms[j][i] = d_i λ^j
    let mut terms: Vec<Vec<Coords>> = Vec::with_capacity(k);
    let mut row: Vec<Coords> = ifs.translations().to_vec();
    for _ in 0..k {
        let next = row
            .iter()
            .map(|c| ring.mul_generator(c))
            .collect::<Result<Vec<_>>>()?;
        terms.push(std::mem::replace(&mut row, next));
    }
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(k);
    let mut partial = vec![ring.zero()];
    search(ring, &terms, target, &mut word, &mut partial, &mut out)?;
    Ok(out)
}

fn search(
    ring: &crate::algebraic::Ring,
    terms: &[Vec<Coords>],
    target: &Coords,
    word: &mut Vec<usize>,
    partial: &mut Vec<Coords>,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    let j = word.len();
    if j == terms.len() {
        if partial[j] == *target {
            out.push(word.clone());
        }
        return Ok(());
    }
    for (i, term) in terms[j].iter().enumerate() {
        let t = ring.add(&partial[j], term)?;
        partial.push(t);
        word.push(i + 1);
        search(ring, terms, target, word, partial, out)?;
        word.pop();
        partial.pop();
    }
    Ok(())
}

/// Heaviest level-`k` class and the certified comparison of its relative
/// size with `λ^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeavyClass {
    pub level: usize,
    pub translation: Coords,
    pub multiplicity: u128,
    /// `#[I]/ℓ^k > λ^k`, decided exactly.
    pub exceeds_lambda_power: bool,
}

/// Entry of maximal multiplicity; ties go to the smallest canonical vector.
pub fn find_heavy_class(ifs: &EqualRatioIfs, k: usize) -> Result<HeavyClass> {
    let table = enumerate_classes(ifs, k)?;
    heavy_from_table(ifs, &table)
}

pub(crate) fn heavy_from_table(ifs: &EqualRatioIfs, table: &ClassTable) -> Result<HeavyClass> {
    let best = table
        .entries()
        .iter()
        .max_by(|a, b| {
            a.multiplicity
                .cmp(&b.multiplicity)
                .then_with(|| b.translation.cmp(&a.translation))
        })
        .ok_or_else(|| Error::domain("empty class table"))?;
    Ok(HeavyClass {
        level: table.level(),
        translation: best.translation.clone(),
        multiplicity: best.multiplicity,
        exceeds_lambda_power: heavy_inequality(ifs, best.multiplicity, table.level()),
    })
}

/// Exact truth value of `multiplicity / ℓ^k > λ^k`.
pub fn heavy_inequality(ifs: &EqualRatioIfs, multiplicity: u128, k: usize) -> bool {
    let ratio = BigRational::new(
        BigInt::from(multiplicity),
        BigInt::from(ifs.len()).pow(k as u32),
    );
    let mut p = vec![BigRational::zero(); k + 1];
    p[0] = ratio;
    p[k] -= BigRational::from_integer(BigInt::from(1));
    ifs.ring().generator().sign_at(&p) == Ordering::Greater
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn golden_small_levels() {
        let ifs = EqualRatioIfs::golden_bernoulli().unwrap();
        let t2 = enumerate_classes(&ifs, 2).unwrap();
        assert_eq!(t2.len(), 4);
        assert!(t2.entries().iter().all(|e| e.multiplicity == 1));
        let t3 = enumerate_classes(&ifs, 3).unwrap();
        assert_eq!(t3.len(), 7);
        let zero = t3.get(&ifs.ring().zero()).unwrap();
        assert_eq!(zero.multiplicity, 2);
        assert_eq!(t3.weight(zero), BigRational::new(1.into(), 4.into()));
        assert_eq!(
            t3.entries().iter().filter(|e| e.multiplicity == 1).count(),
            6
        );
        let members = class_members(&ifs, 3, &ifs.ring().zero()).unwrap();
        assert_eq!(members, vec![vec![1, 2, 2], vec![2, 1, 1]]);
    }

    #[test]
    fn level_zero_and_one() {
        let ifs = EqualRatioIfs::cantor();
        let t0 = enumerate_classes(&ifs, 0).unwrap();
        assert_eq!(t0.len(), 1);
        assert!(t0.total_weight().is_one());
        let d1 = ifs.translations()[0].clone();
        assert_eq!(class_members(&ifs, 1, &d1).unwrap(), vec![vec![1]]);
        let half = ifs
            .ring()
            .rational_const(&BigRational::new(1.into(), 2.into()))
            .unwrap();
        assert!(class_members(&ifs, 2, &half).unwrap().is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let ifs = EqualRatioIfs::cantor();
        match enumerate_classes_with_budget(&ifs, 10, 100) {
            Err(Error::Budget { level, .. }) => assert_eq!(level, 7),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn cantor_has_no_overlaps() {
        let ifs = EqualRatioIfs::cantor();
        for k in 0..=12 {
            let h = find_heavy_class(&ifs, k).unwrap();
            assert_eq!(h.multiplicity, 1);
            // 1/2^k > 1/3^k for every k >= 1.
            assert_eq!(h.exceeds_lambda_power, k > 0);
        }
    }

    #[test]
    fn unequal_weights_are_tracked() {
        let ring = crate::algebraic::Ring::rational(BigRational::new(1.into(), 3.into()));
        let t = vec![ring.integer(0), ring.integer(1), ring.integer(2)];
        let w = vec![
            BigRational::new(1.into(), 4.into()),
            BigRational::new(5.into(), 12.into()),
            BigRational::new(1.into(), 3.into()),
        ];
        let ifs = EqualRatioIfs::new(ring, t, w).unwrap();
        let table = enumerate_classes(&ifs, 6).unwrap();
        assert!(table.total_weight().is_one());
        assert_eq!(table.weight_den(), 12u128.pow(6));
    }
}
