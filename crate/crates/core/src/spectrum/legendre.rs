use serde::{Deserialize, Serialize};

use super::{fmt_q, SpectrumCurve};
use crate::{Error, Result};

/// Anything that can be read as a sorted list of `(x, y)` samples.
pub trait Samples {
    fn points(&self) -> Vec<(f64, f64)>;
}

impl Samples for SpectrumCurve {
    fn points(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.q, s.tau)).collect()
    }
}

impl Samples for LegendreCurve {
    fn points(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.alpha, s.tau_star)).collect()
    }
}

impl Samples for [(f64, f64)] {
    fn points(&self) -> Vec<(f64, f64)> {
        self.to_vec()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendreSample {
    pub alpha: f64,
    pub tau_star: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendreCurve {
    /// Sorted by increasing `alpha`.
    pub samples: Vec<LegendreSample>,
    pub alpha_min_hat: f64,
    pub alpha_max_hat: f64,
}

impl LegendreCurve {
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("alpha,tau_star\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{:.*},{:.*}\n",
                digits, s.alpha, digits, s.tau_star
            ));
        }
        out
    }

    /// `min_α (αx − τ*(α))` over the stored samples.
    pub fn conjugate_at(&self, x: f64) -> Option<f64> {
        self.samples
            .iter()
            .map(|s| s.alpha * x - s.tau_star)
            .min_by(f64::total_cmp)
    }
}

/// Vertices of the upper concave hull of points sorted by `x`.
pub fn upper_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        if let Some(last) = hull.last() {
            if last.0 == p.0 {
                if p.1 > last.1 {
                    hull.pop();
                } else {
                    continue;
                }
            }
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b unless it lies above the chord a-p beyond rounding.
            let (u, v) = ((b.0 - a.0) * (p.1 - a.1), (b.1 - a.1) * (p.0 - a.0));
            if u - v >= -1e-12 * (u.abs() + v.abs()) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// `(slope, conjugate)` for each hull edge, sorted by increasing slope.
///
/// The conjugate `min_x (slope·x − y)` is attained at both ends of the edge;
/// the smaller of the two evaluations is kept.
pub fn conjugate_points(hull: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = hull
        .windows(2)
        .map(|w| {
            let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let v = (s * w[0].0 - w[0].1).min(s * w[1].0 - w[1].1);
            (s, v)
        })
        .collect();
    out.reverse();
    out
}

/// Discrete concave conjugate `τ*(α) = min_q (αq − τ̂(q))` taken over the
/// upper hull of the samples.
pub fn legendre<S: Samples + ?Sized>(curve: &S) -> Result<LegendreCurve> {
    let mut pts = curve.points();
    if pts.len() < 2 {
        return Err(Error::domain(
            "Legendre transform needs at least two samples",
        ));
    }
    if pts.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::domain("non-finite sample"));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let hull = upper_hull(&pts);
    let conj = conjugate_points(&hull);
    let samples: Vec<LegendreSample> = conj
        .iter()
        .map(|&(alpha, tau_star)| LegendreSample { alpha, tau_star })
        .collect();
    Ok(LegendreCurve {
        alpha_min_hat: samples.first().map_or(f64::NAN, |s| s.alpha),
        alpha_max_hat: samples.last().map_or(f64::NAN, |s| s.alpha),
        samples,
    })
}

impl std::fmt::Display for LegendreCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "alpha in [{}, {}], {} samples",
            fmt_q(self.alpha_min_hat),
            fmt_q(self.alpha_max_hat),
            self.samples.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_curve_gives_one_point() {
        let s = 0.63;
        let pts: Vec<(f64, f64)> = (1..=16)
            .map(|i| (i as f64 * 0.25, s * (i as f64 * 0.25 - 1.0)))
            .collect();
        let l = legendre(pts.as_slice()).unwrap();
        assert_eq!(l.samples.len(), 1);
        assert!((l.samples[0].alpha - s).abs() < 1e-12);
        assert!((l.samples[0].tau_star - s).abs() < 1e-12);
        assert_eq!(l.alpha_min_hat, l.alpha_max_hat);
    }

    #[test]
    fn hull_drops_dips() {
        let pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 0.5), (3.0, 1.5), (4.0, 1.0)];
        assert_eq!(
            upper_hull(&pts),
            vec![(0.0, 0.0), (1.0, 1.0), (3.0, 1.5), (4.0, 1.0)]
        );
    }

    #[test]
    fn double_conjugate_returns_interior_vertices() {
        let f = |q: f64| -(2f64.powf(-q) + 3f64.powf(-q)).ln() - 2f64.ln();
        let pts: Vec<(f64, f64)> = (0..=20)
            .map(|i| (0.5 + 0.175 * i as f64, f(0.5 + 0.175 * i as f64)))
            .collect();
        let once = legendre(pts.as_slice()).unwrap();
        let twice = legendre(&once).unwrap();
        assert_eq!(twice.samples.len(), pts.len() - 2);
        for (s, p) in twice.samples.iter().zip(&pts[1..pts.len() - 1]) {
            assert!((s.alpha - p.0).abs() < 1e-12);
            assert!((s.tau_star - p.1).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn conjugacy_inequality(ys in prop::collection::vec(-5.0f64..5.0, 3..30)) {
            let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (0.1 + 0.2 * i as f64, y)).collect();
            let l = legendre(pts.as_slice()).unwrap();
            let hull = upper_hull(&pts);
            for s in &l.samples {
                for p in &pts {
                    prop_assert!(s.alpha * p.0 - p.1 >= s.tau_star - 1e-12);
                }
                let best = hull.iter().map(|p| s.alpha * p.0 - p.1).fold(f64::INFINITY, f64::min);
                prop_assert!((best - s.tau_star).abs() <= 1e-12 * (1.0 + best.abs()));
            }
        }
    }
}
