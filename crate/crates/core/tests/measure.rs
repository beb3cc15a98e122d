use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use salemfrac::ifs::EqualRatioIfs;
use salemfrac::measure::{
    box_masses, box_masses_unguarded, depth_for_scale, discretize, local_dimension_estimate,
};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

#[test]
fn conservation_and_refinement() {
    for ifs in [
        EqualRatioIfs::cantor(),
        EqualRatioIfs::golden_bernoulli().unwrap(),
        EqualRatioIfs::salem_bernoulli(4).unwrap(),
    ] {
        let m = discretize(&ifs, 12).unwrap();
        assert!(m.total_weight().is_one());
        let fine = box_masses_unguarded(&m, 12).unwrap();
        assert!(fine.total().is_one());
        for level in 0..12 {
            let direct = box_masses_unguarded(&m, level).unwrap();
            assert_eq!(fine.coarsen(level).unwrap(), direct);
        }
    }
}

/// Weight of depth-`n` atoms within `delta` of a level-`m` box edge.
fn boundary_weight(ifs: &EqualRatioIfs, n: usize, m: u32, delta: f64) -> BigRational {
    let measure = discretize(ifs, n).unwrap();
    let scale = (1u64 << m) as f64;
    let mut w = BigRational::zero();
    for a in measure.atoms() {
        let x = a.enclosure.lo as f64 / 2f64.powi(96) * scale;
        let d = (x - x.round()).abs() / scale;
        if d <= delta {
            w += measure.weight(a);
        }
    }
    w
}

#[test]
fn scale_alignment_between_depths() {
    for ifs in [
        EqualRatioIfs::cantor(),
        EqualRatioIfs::golden_bernoulli().unwrap(),
    ] {
        for m in [4u32, 8, 12] {
            let n = depth_for_scale(&ifs, m).unwrap();
            let a = box_masses(&discretize(&ifs, n).unwrap(), m).unwrap();
            let b = box_masses(&discretize(&ifs, n + 1).unwrap(), m).unwrap();
            let hull = ifs.attractor_interval(&q(1, 1 << 20));
            let lam = ifs.ring().generator().to_f64();
            let delta = lam.powi(n as i32) * to_f64(&hull.width()) * 1.01;
            let bound = boundary_weight(&ifs, n, m, delta);
            let keys: std::collections::BTreeSet<i64> =
                a.raw().iter().chain(b.raw()).map(|x| x.0).collect();
            for v in keys {
                let diff = a.mass(v) - b.mass(v);
                let diff = if diff < BigRational::zero() {
                    -diff
                } else {
                    diff
                };
                assert!(diff <= bound, "m={m} v={v}");
            }
        }
    }
}

#[test]
fn lebesgue_local_dimension() {
    let ifs = EqualRatioIfs::lebesgue();
    let x = q(1, 3);
    let scales: Vec<u32> = (10..=16).collect();
    let rows = local_dimension_estimate(&ifs, &x, &scales).unwrap();
    for r in rows {
        let n = r.depth as u32;
        // Atoms k/2^n inside [x - 2^-m, x + 2^-m].
        let lo =
            ((q(1, 3) - q(1, 1 << r.m)) * BigRational::from_integer(BigInt::one() << n)).ceil();
        let hi =
            ((q(1, 3) + q(1, 1 << r.m)) * BigRational::from_integer(BigInt::one() << n)).floor();
        let count = to_f64(&(hi - lo)) + 1.0;
        let oracle = -(count / 2f64.powi(n as i32)).log2() / r.m as f64;
        let est = r.estimate.unwrap();
        assert!((est - oracle).abs() < 1e-12);
        // The closed ball of radius 2^-m has Lebesgue mass 2^(1-m).
        let exact = (r.m as f64 - 1.0) / r.m as f64;
        assert!((est - exact).abs() < 0.02, "m={} est={est}", r.m);
    }
}

/// Cantor function at a rational point of [0, 1].
fn cantor_function(x: &BigRational) -> f64 {
    let mut x = x.clone();
    let mut value = 0.0;
    let mut weight = 0.5;
    for _ in 0..200 {
        x *= BigRational::from_integer(3.into());
        let d = x.floor();
        x -= &d;
        match d.to_integer().to_i64().unwrap() {
            0 => {}
            1 => return value + weight,
            _ => value += weight,
        }
        weight *= 0.5;
    }
    value
}

#[test]
fn cantor_local_dimension_at_zero() {
    let ifs = EqualRatioIfs::cantor();
    let scales: Vec<u32> = (20..=24).collect();
    let rows = local_dimension_estimate(&ifs, &q(0, 1), &scales).unwrap();
    let dim = 2f64.ln() / 3f64.ln();
    for r in rows {
        let mass = cantor_function(&q(1, 1 << r.m));
        let oracle = -mass.log2() / r.m as f64;
        let est = r.estimate.unwrap();
        assert!((est - oracle).abs() < 0.01, "m={}", r.m);
        assert!((est - dim).abs() < 0.05, "m={}", r.m);
    }
}

#[test]
fn outside_the_attractor_has_no_mass() {
    let rows = local_dimension_estimate(&EqualRatioIfs::cantor(), &q(3, 1), &[2, 4, 6]).unwrap();
    assert!(rows.iter().all(|r| r.estimate.is_none()));
}
