//! Class tables against a brute-force enumeration that builds each word's
//! translation from explicit powers `d_i λ^(j-1)`.

mod common;

use common::{brute_force, systems};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use salemfrac::algebraic::Coords;
use salemfrac::ifs::{enumerate_classes, EqualRatioIfs};

#[test]
fn dp_matches_brute_force_up_to_level_12() {
    for (name, ifs) in systems() {
        for k in 0..=12 {
            let table = enumerate_classes(&ifs, k).unwrap();
            let oracle = brute_force(&ifs, k);
            assert_eq!(table.len(), oracle.len(), "{name} k={k}");
            for e in table.entries() {
                let (m, w) = &oracle[&e.translation];
                assert_eq!(e.multiplicity, *m, "{name} k={k}");
                assert_eq!(&table.weight(e), w, "{name} k={k}");
            }
        }
    }
}

#[test]
fn distinct_vectors_are_distinct_reals() {
    // Separate every pair of neighbouring class translations by enclosure.
    for (name, ifs) in systems() {
        let table = enumerate_classes(&ifs, 8).unwrap();
        let ring = ifs.ring();
        let mut items: Vec<Coords> = table
            .entries()
            .iter()
            .map(|e| e.translation.clone())
            .collect();
        ring.sort_by_value(&mut items);
        let width = BigRational::new(BigInt::from(1), BigInt::from(1u64 << 60));
        for pair in items.windows(2) {
            let a = ring.enclose_to(&pair[0], &width);
            let b = ring.enclose_to(&pair[1], &width);
            assert!(a.hi() < b.lo(), "{name}: {} vs {}", pair[0], pair[1]);
        }
    }
}

#[test]
fn conservation_symmetry_and_growth() {
    for (name, ifs) in systems() {
        let mut prev = 1usize;
        for k in 0..=14 {
            let table = enumerate_classes(&ifs, k).unwrap();
            assert_eq!(table.total_multiplicity(), 1u128 << k, "{name}");
            assert!(table.total_weight().is_one(), "{name}");
            assert!(table.len() <= 2 * prev, "{name}");
            prev = table.len();
            if name != "cantor" {
                let ring = ifs.ring();
                for e in table.entries() {
                    let neg = ring.neg(&e.translation).unwrap();
                    assert_eq!(table.get(&neg).unwrap().multiplicity, e.multiplicity);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn compose_word_agrees_with_power_sum(word in proptest::collection::vec(1usize..=2, 0..20)) {
        let ifs = EqualRatioIfs::salem_bernoulli(4).unwrap();
        let ring = ifs.ring();
        let mut t = ring.zero();
        for (j, &i) in word.iter().enumerate() {
            let term = ring.mul_generator_pow(&ifs.translations()[i - 1], j).unwrap();
            t = ring.add(&t, &term).unwrap();
        }
        prop_assert_eq!(ifs.compose_word(&word).unwrap().translation, t);
    }
}
