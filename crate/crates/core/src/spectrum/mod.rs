//! `L^q` spectrum estimates from exact dyadic box masses.
//!
//! `τ̂_m(q) = log Σ_Q μ(Q)^q / (-m log 2)` over the level-`m` boxes, with the
//! measure discretized at the depth-for-scale rule. Only `q > 0` is
//! supported.

mod bounds;
mod casestudy;
mod legendre;

use std::path::PathBuf;

use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ifs::{EqualRatioIfs, DEFAULT_ENTRY_BUDGET};
use crate::measure::{
    box_masses, box_masses_unguarded, depth_for_scale, load_or_discretize, BoxMasses,
};
use crate::numeric::rational_to_f64;
use crate::{Error, Result};

pub use bounds::{
    dim_attractor_is_full, packing_sum, tau_prime_infty_upper_bound, PackingResult, SlopeBound,
};
pub use casestudy::{three_map_casestudy, CaseStudyReport};
pub use legendre::{conjugate_points, legendre, upper_hull, LegendreCurve, Samples};

/// Default tolerance for the discrete concavity check.
pub const TOL_CONCAVE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub q: f64,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub digest: String,
    pub level: u32,
    pub depth: usize,
    pub method: String,
    /// The depth was capped below the depth-for-scale rule.
    pub guard_overridden: bool,
    pub atoms: usize,
    pub boxes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCurve {
    pub samples: Vec<SpectrumSample>,
    pub meta: SpectrumMeta,
    /// Concavity violations beyond the tolerance (finite-size effects).
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SpectrumOptions {
    /// Cap on the discretization depth; when it binds, the scale-alignment
    /// guard is bypassed and the curve is flagged.
    pub max_depth: Option<usize>,
    pub budget: usize,
    pub cache_dir: Option<PathBuf>,
    pub tol_concave: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            max_depth: None,
            budget: DEFAULT_ENTRY_BUDGET,
            cache_dir: None,
            tol_concave: TOL_CONCAVE,
        }
    }
}

/// `τ̂` from box masses; exactly `0` at `q = 1` when the masses sum to 1.
pub fn tau_from_boxes(boxes: &BoxMasses, q: &BigRational) -> f64 {
    if q.is_one() && boxes.total().is_one() {
        return 0.0;
    }
    let m = boxes.level().max(1) as f64;
    boxes.ln_moment(rational_to_f64(q)) / (-m * std::f64::consts::LN_2)
}

/// Box masses at level `m` following the depth rule and options.
pub fn spectrum_boxes(
    ifs: &EqualRatioIfs,
    m: u32,
    opts: &SpectrumOptions,
) -> Result<(BoxMasses, SpectrumMeta)> {
    let rule = depth_for_scale(ifs, m)?;
    let (depth, overridden) = match opts.max_depth {
        Some(cap) if cap < rule => (cap, true),
        _ => (rule, false),
    };
    let (measure, _) = load_or_discretize(ifs, depth, opts.budget, opts.cache_dir.as_deref())?;
    let boxes = if overridden {
        box_masses_unguarded(&measure, m)?
    } else {
        box_masses(&measure, m)?
    };
    let meta = SpectrumMeta {
        digest: ifs.digest(),
        level: m,
        depth,
        method: "dyadic-box".into(),
        guard_overridden: overridden,
        atoms: measure.len(),
        boxes: boxes.len(),
    };
    Ok((boxes, meta))
}

pub fn tau_hat(ifs: &EqualRatioIfs, q: &BigRational, m: u32) -> Result<f64> {
    if !q.is_positive() {
        return Err(Error::domain("q must be positive"));
    }
    let (boxes, _) = spectrum_boxes(ifs, m, &SpectrumOptions::default())?;
    Ok(tau_from_boxes(&boxes, q))
}

pub fn tau_curve(ifs: &EqualRatioIfs, grid: &[BigRational], m: u32) -> Result<SpectrumCurve> {
    tau_curve_with(ifs, grid, m, &SpectrumOptions::default())
}

pub fn tau_curve_with(
    ifs: &EqualRatioIfs,
    grid: &[BigRational],
    m: u32,
    opts: &SpectrumOptions,
) -> Result<SpectrumCurve> {
    validate_grid(grid)?;
    let (boxes, meta) = spectrum_boxes(ifs, m, opts)?;
    Ok(curve_from_boxes(&boxes, grid, meta, opts.tol_concave))
}

pub fn validate_grid(grid: &[BigRational]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain("empty q grid"));
    }
    if grid.iter().any(|q| !q.is_positive()) {
        return Err(Error::domain("q grid must be positive"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("q grid must be strictly increasing"));
    }
    Ok(())
}

pub fn curve_from_boxes(
    boxes: &BoxMasses,
    grid: &[BigRational],
    meta: SpectrumMeta,
    tol_concave: f64,
) -> SpectrumCurve {
    let samples: Vec<SpectrumSample> = grid
        .par_iter()
        .map(|q| SpectrumSample {
            q: rational_to_f64(q),
            tau: tau_from_boxes(boxes, q),
        })
        .collect();
    let warnings = concavity_violations(&samples, tol_concave)
        .into_iter()
        .map(|(q, excess)| format!("concavity violated at q = {q} by {excess:.3e}"))
        .collect();
    SpectrumCurve {
        samples,
        meta,
        warnings,
    }
}

/// Interior grid points where the chord slope increases by more than `tol`.
pub fn concavity_violations(samples: &[SpectrumSample], tol: f64) -> Vec<(f64, f64)> {
    let slopes: Vec<f64> = samples
        .windows(2)
        .map(|w| (w[1].tau - w[0].tau) / (w[1].q - w[0].q))
        .collect();
    slopes
        .windows(2)
        .enumerate()
        .filter_map(|(i, s)| {
            let excess = s[1] - s[0];
            (excess > tol).then_some((samples[i + 1].q, excess))
        })
        .collect()
}

impl SpectrumCurve {
    /// Chord slope `τ̂(q_max)/q_max`, a proxy for `τ'(+∞)`.
    pub fn chord_slope_at_max(&self) -> Option<f64> {
        self.samples.last().map(|s| s.tau / s.q)
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("q,tau_hat\n");
        for s in &self.samples {
            out.push_str(&format!("{},{:.*}\n", fmt_q(s.q), digits, s.tau));
        }
        out
    }
}

pub(crate) fn fmt_q(q: f64) -> String {
    let s = format!("{q:.12}");
    let s = s.trim_end_matches('0');
    s.strip_suffix('.').unwrap_or(s).to_string()
}

/// Numerical derivative of the sampled curve at `q`.
///
/// Interior grid points use the central difference with one Richardson step
/// when the four neighbours are evenly spaced; the first and last points use
/// one-sided differences; off-grid points use the three-point formula on the
/// nearest samples.
pub fn derivative_estimate(curve: &SpectrumCurve, q: f64) -> Result<f64> {
    let s = &curve.samples;
    if s.len() < 2 {
        return Err(Error::domain("need at least two samples"));
    }
    let (first, last) = (s[0].q, s[s.len() - 1].q);
    let eps = 1e-12 * (1.0 + q.abs());
    if !(q >= first - eps && q <= last + eps) {
        return Err(Error::domain(format!(
            "q = {q} outside the grid [{first}, {last}]"
        )));
    }
    let slope = |a: &SpectrumSample, b: &SpectrumSample| (b.tau - a.tau) / (b.q - a.q);
    if (q - first).abs() <= eps {
        return Ok(slope(&s[0], &s[1]));
    }
    if (q - last).abs() <= eps {
        return Ok(slope(&s[s.len() - 2], &s[s.len() - 1]));
    }
    if let Some(i) = s.iter().position(|x| (x.q - q).abs() <= eps) {
        let h1 = s[i].q - s[i - 1].q;
        let h2 = s[i + 1].q - s[i].q;
        let even = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
        if even(h1, h2) {
            let d1 = (s[i + 1].tau - s[i - 1].tau) / (2.0 * h1);
            if i >= 2 && i + 2 < s.len() {
                let g1 = s[i - 1].q - s[i - 2].q;
                let g2 = s[i + 2].q - s[i + 1].q;
                if even(g1, h1) && even(g2, h1) {
                    let d2 = (s[i + 2].tau - s[i - 2].tau) / (4.0 * h1);
                    return Ok((4.0 * d1 - d2) / 3.0);
                }
            }
            return Ok(d1);
        }
        return Ok(three_point(&s[i - 1], &s[i], &s[i + 1], q));
    }
    let j = s.partition_point(|x| x.q < q);
    let (a, b, c) = if j + 1 < s.len() {
        (&s[j - 1], &s[j], &s[j + 1])
    } else {
        (&s[j - 2], &s[j - 1], &s[j])
    };
    Ok(three_point(a, b, c, q))
}

/// Derivative at `x` of the parabola through three samples.
fn three_point(a: &SpectrumSample, b: &SpectrumSample, c: &SpectrumSample, x: f64) -> f64 {
    let (x0, x1, x2) = (a.q, b.q, c.q);
    a.tau * (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + b.tau * (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2))
        + c.tau * (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::parse_grid;

    fn curve_of(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> SpectrumCurve {
        let samples = (0..=n)
            .map(|i| {
                let q = lo + (hi - lo) * i as f64 / n as f64;
                SpectrumSample { q, tau: f(q) }
            })
            .collect();
        SpectrumCurve {
            samples,
            meta: SpectrumMeta {
                digest: String::new(),
                level: 0,
                depth: 0,
                method: "synthetic".into(),
                guard_overridden: false,
                atoms: 0,
                boxes: 0,
            },
            warnings: vec![],
        }
    }

    #[test]
    fn derivative_of_linear_and_concave_curves() {
        let lin = curve_of(|q| 0.7 * (q - 1.0), 0.5, 4.0, 14);
        for q in [0.5, 1.0, 2.25, 3.1, 4.0] {
            assert!((derivative_estimate(&lin, q).unwrap() - 0.7).abs() < 1e-12);
        }
        assert!(derivative_estimate(&lin, 4.5).is_err());
        assert!(derivative_estimate(&lin, 0.1).is_err());

        let f = |q: f64| -(2f64.powf(-q) + 3f64.powf(-q)).ln();
        let df = |q: f64| {
            let (a, b) = (2f64.powf(-q), 3f64.powf(-q));
            (a * 2f64.ln() + b * 3f64.ln()) / (a + b)
        };
        let c = curve_of(f, 0.5, 4.0, 350);
        for q in [0.8, 1.0, 2.0, 3.5] {
            assert!(
                (derivative_estimate(&c, q).unwrap() - df(q)).abs() < 1e-4,
                "q={q}"
            );
        }
        assert!((derivative_estimate(&c, 1.234).unwrap() - df(1.234)).abs() < 1e-4);
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&parse_grid("0.5:4:0.25").unwrap()).is_ok());
        assert!(validate_grid(&parse_grid("0:1:0.5").unwrap()).is_err());
        let mut g = parse_grid("1:2:0.5").unwrap();
        g.swap(0, 1);
        assert!(validate_grid(&g).is_err());
        assert!(validate_grid(&[]).is_err());
    }

    #[test]
    fn uniform_grid_tau_is_exact() {
        let ifs = EqualRatioIfs::lebesgue();
        let grid = parse_grid("0.5:3:0.5").unwrap();
        let c = tau_curve(&ifs, &grid, 10).unwrap();
        for s in &c.samples {
            assert!((s.tau - (s.q - 1.0)).abs() < 1e-12);
        }
        assert_eq!(c.samples[1].tau, 0.0);
        assert!(c.warnings.is_empty());
        assert!(c
            .to_csv(6)
            .starts_with("q,tau_hat\n0.5,-0.500000\n1,0.000000\n"));
    }

    #[test]
    fn depth_cap_is_flagged() {
        let ifs = EqualRatioIfs::cantor();
        let opts = SpectrumOptions {
            max_depth: Some(3),
            ..Default::default()
        };
        let c = tau_curve_with(&ifs, &[BigRational::one()], 8, &opts).unwrap();
        assert!(c.meta.guard_overridden);
        assert_eq!(c.meta.depth, 3);
        assert_eq!(c.samples[0].tau, 0.0);
    }
}
