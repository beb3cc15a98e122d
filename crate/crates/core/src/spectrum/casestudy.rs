use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

const P: [f64; 3] = [0.25, 5.0 / 12.0, 1.0 / 3.0];

/// Closed-form checks for the three-map family with weights
/// `(1/4, 5/12, 1/3)` and moment function `f(q) = Σ p_i^q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseStudyReport {
    /// `f(1) = 1`, checked on exact rationals.
    pub f_at_one_is_one: bool,
    pub f_at_1_5_squared: f64,
    /// `Π p_i^{p_i}`.
    pub weighted_geometric_mean: f64,
    /// `0.3405` lies above the weighted geometric mean.
    pub lower_lambda_above_mean: bool,
    /// `log f(q)/(q−1)` strictly increasing on `q = 1 + i/100`, `i = 1..=100`.
    pub ratio_increasing: bool,
    /// Largest `λ` checked against `λ < f(1.5)^2`.
    pub lambda_max: f64,
    pub lambda_max_below_f_squared: bool,
    /// `λ(√3 + 1) < 1` at `lambda_max`, decided exactly.
    pub transversality_holds: bool,
    pub lambda: f64,
    /// Range of `d/dq [log f(q)/log λ]` over `1.5 < q < 2`.
    pub local_dimension_interval: (f64, f64),
    /// `log f(q)/log λ < q − 1` on the sampled `q ∈ (1.5, 2)`.
    pub moment_branch_active: bool,
}

pub fn f(q: f64) -> f64 {
    P.iter().map(|p| p.powf(q)).sum()
}

fn df(q: f64) -> f64 {
    P.iter().map(|p| p.powf(q) * p.ln()).sum()
}

/// `d/dq [log f(q)/log λ]`.
pub fn g_prime(q: f64, lambda: f64) -> f64 {
    df(q) / (f(q) * lambda.ln())
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `λ(√3 + 1) < 1` for rational `λ ∈ (0, 1)`, via `3 < (1/λ − 1)^2`.
pub fn transversality(lambda: &BigRational) -> bool {
    if !lambda.is_positive() || lambda >= &BigRational::one() {
        return false;
    }
    let t = lambda.recip() - BigRational::one();
    &t * &t > q(3, 1)
}

pub fn three_map_casestudy() -> CaseStudyReport {
    let exact_sum = q(1, 4) + q(5, 12) + q(1, 3);
    let f15 = f(1.5);
    let mean: f64 = P.iter().map(|p| p.powf(*p)).product();
    let ratios: Vec<f64> = (1..=100)
        .map(|i| {
            let x = 1.0 + i as f64 / 100.0;
            f(x).ln() / (x - 1.0)
        })
        .collect();
    let lambda = 0.342;
    let interior: Vec<f64> = (1..200).map(|i| 1.5 + i as f64 / 400.0).collect();
    let derivs: Vec<f64> = interior.iter().map(|&x| g_prime(x, lambda)).collect();
    let lo = derivs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = derivs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    CaseStudyReport {
        f_at_one_is_one: exact_sum.is_one(),
        f_at_1_5_squared: f15 * f15,
        weighted_geometric_mean: mean,
        lower_lambda_above_mean: 0.3405 > mean,
        ratio_increasing: ratios.windows(2).all(|w| w[0] < w[1]),
        lambda_max: 0.3438,
        lambda_max_below_f_squared: 0.3438 < f15 * f15,
        transversality_holds: transversality(&q(3438, 10000)),
        lambda,
        local_dimension_interval: (lo, hi),
        moment_branch_active: interior.iter().all(|&x| f(x).ln() / lambda.ln() < x - 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_values() {
        let r = three_map_casestudy();
        assert!(r.f_at_one_is_one);
        assert!((r.f_at_1_5_squared - 0.34387).abs() < 5e-5);
        assert!((r.weighted_geometric_mean - 0.34042).abs() < 5e-5);
        assert!(r.lower_lambda_above_mean);
        assert!(r.ratio_increasing);
        assert!(r.lambda_max_below_f_squared);
        assert!(r.transversality_holds);
        assert!(r.moment_branch_active);
        let (lo, hi) = r.local_dimension_interval;
        assert!(lo < hi);
        // Endpoints from the derivative formula at q = 2 and q = 1.5.
        assert!((lo - g_prime(2.0, 0.342)).abs() < 1e-3);
        assert!((hi - g_prime(1.5, 0.342)).abs() < 1e-3);
    }

    #[test]
    fn transversality_threshold() {
        // 1/(√3 + 1) = (√3 − 1)/2 ≈ 0.36603.
        assert!(transversality(&q(366, 1000)));
        assert!(!transversality(&q(367, 1000)));
        assert!(!transversality(&q(0, 1)));
    }
}
