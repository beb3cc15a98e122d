//! Moran constructions with level-uniform contraction ratios, and the
//! block schedules `θ(ℓ)`, `n_ℓ` built from a sequence `L_0 = 0, L_1, …`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::numeric::{compensated_sum, ln_biguint, ln_rational, parse_rational};
use crate::{Error, Result};

/// Threshold on `log c_ℓ / log M_ℓ` at the last level above which the
/// dimension formula's hypothesis is flagged.
pub const PROXY_WARN: f64 = 0.1;

/// `N_ℓ` branches per node at level `ℓ`, each child radius `r_ℓ` times its
/// parent's. Stored as natural logarithms.
#[derive(Clone, Debug, PartialEq)]
pub struct MoranParams {
    ln_branches: Vec<f64>,
    ln_ratios: Vec<f64>,
}

impl MoranParams {
    pub fn new(branches: &[u64], ratios: &[BigRational]) -> Result<Self> {
        if branches.len() != ratios.len() {
            return Err(Error::domain("branch and ratio lists differ in length"));
        }
        if branches.contains(&0) {
            return Err(Error::domain("branch count N_l must be at least 1"));
        }
        let ln_ratios = ratios
            .iter()
            .map(|r| {
                if r.is_positive() && r < &BigRational::one() {
                    Ok(ln_rational(r))
                } else {
                    Err(Error::domain(format!("ratio {r} outside (0, 1)")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MoranParams {
            ln_branches: branches.iter().map(|&n| (n as f64).ln()).collect(),
            ln_ratios,
        })
    }

    /// `len` levels cycling through the given branch counts and ratios.
    pub fn periodic(branches: &[u64], ratios: &[BigRational], len: usize) -> Result<Self> {
        if branches.is_empty() || ratios.is_empty() {
            return Err(Error::domain("empty period"));
        }
        let b: Vec<u64> = (0..len).map(|i| branches[i % branches.len()]).collect();
        let r: Vec<BigRational> = (0..len).map(|i| ratios[i % ratios.len()].clone()).collect();
        Self::new(&b, &r)
    }

    pub fn len(&self) -> usize {
        self.ln_branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_branches.is_empty()
    }

    pub fn ln_branches(&self) -> &[f64] {
        &self.ln_branches
    }

    pub fn ln_ratios(&self) -> &[f64] {
        &self.ln_ratios
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoranDimension {
    /// `s_ℓ` solving `Σ_{ω∈D_ℓ} r_ω^s = 1`, for `ℓ = 1..=ℓ_max`.
    pub s: Vec<f64>,
    /// `min_{k ≥ ℓ} s_k` over the computed range.
    pub tail_infimum: Vec<f64>,
    /// Tail infimum from `ℓ_max/2` on; evidence for the liminf, not a limit.
    pub liminf_estimate: f64,
    /// `log c_ℓ / log M_ℓ`.
    pub proxy: Vec<f64>,
    pub warning: Option<String>,
}

pub fn moran_dimension(params: &MoranParams, ell_max: usize) -> Result<MoranDimension> {
    if ell_max == 0 || ell_max > params.len() {
        return Err(Error::domain(format!(
            "l_max must lie in 1..={} for these parameters",
            params.len()
        )));
    }
    let mut s = Vec::with_capacity(ell_max);
    let mut proxy = Vec::with_capacity(ell_max);
    for l in 1..=ell_max {
        let ln_n = compensated_sum(params.ln_branches[..l].iter().copied());
        let ln_m = compensated_sum(params.ln_ratios[..l].iter().copied());
        s.push(ln_n / -ln_m);
        proxy.push(params.ln_ratios[l - 1] / ln_m);
    }
    let mut tail_infimum = s.clone();
    for i in (0..ell_max.saturating_sub(1)).rev() {
        tail_infimum[i] = tail_infimum[i].min(tail_infimum[i + 1]);
    }
    let liminf_estimate = tail_infimum[(ell_max - 1) / 2];
    let last = proxy[ell_max - 1];
    let warning = (last > PROXY_WARN).then(|| {
        format!("log c_l / log M_l = {last:.4} at l = {ell_max}; the dimension formula needs it to tend to 0")
    });
    Ok(MoranDimension {
        s,
        tail_infimum,
        liminf_estimate,
        proxy,
        warning,
    })
}

/// One level of a block schedule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleRow {
    pub ell: usize,
    pub theta: usize,
    #[serde(serialize_with = "as_string")]
    pub n: BigUint,
    /// `n_1 + … + n_ℓ`.
    #[serde(serialize_with = "as_string")]
    pub prefix: BigUint,
}

fn as_string<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `θ(ℓ)` is the `j ≥ 1` with `L_0 + … + L_{j-1} ≤ ℓ < L_0 + … + L_j`, and
/// `n_1 = L_1`, `n_ℓ = ⌊(n_1 + … + n_{ℓ-1})/θ(ℓ)⌋ + 1`. Past the supplied
/// list the last block never ends.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockSchedule {
    pub l: Vec<u64>,
    pub rows: Vec<ScheduleRow>,
}

pub fn schedule_from_l(l: &[u64], ell_max: usize) -> Result<BlockSchedule> {
    if l.len() < 2 || l[0] != 0 {
        return Err(Error::domain("L must start with L_0 = 0 and contain L_1"));
    }
    if l[1] < 2 {
        return Err(Error::domain("L_1 must be at least 2"));
    }
    if l[1..].contains(&0) {
        return Err(Error::domain("L_j must be positive for j >= 1"));
    }
    if ell_max == 0 {
        return Err(Error::domain("l_max must be positive"));
    }
    // starts[j] = L_0 + … + L_{j-1}; block j covers [starts[j], starts[j+1]).
    let mut starts = vec![0u128];
    for &x in l {
        starts.push(starts.last().unwrap() + x as u128);
    }
    let mut rows: Vec<ScheduleRow> = Vec::with_capacity(ell_max);
    let mut theta = 1usize;
    let mut prefix = BigUint::zero();
    for ell in 1..=ell_max {
        while theta + 1 < starts.len() && starts[theta + 1] <= ell as u128 {
            theta += 1;
        }
        let n = if ell == 1 {
            BigUint::from(l[1])
        } else {
            &prefix / BigUint::from(theta) + 1u32
        };
        prefix += &n;
        rows.push(ScheduleRow {
            ell,
            theta,
            n,
            prefix: prefix.clone(),
        });
    }
    Ok(BlockSchedule {
        l: l.to_vec(),
        rows,
    })
}

impl BlockSchedule {
    /// Exact checks: `θ(1) = 1`, unit steps, and
    /// `n_ℓ - 1 ≤ (n_1 + … + n_{ℓ-1})/θ(ℓ) < n_ℓ`.
    pub fn check_invariants(&self) -> Result<()> {
        if self.rows.first().is_some_and(|r| r.theta != 1) {
            return Err(Error::domain("theta(1) must be 1"));
        }
        for w in self.rows.windows(2) {
            let step = w[1].theta as i64 - w[0].theta as i64;
            if !(0..=1).contains(&step) {
                return Err(Error::domain(format!(
                    "theta jumps by {step} at l = {}",
                    w[1].ell
                )));
            }
            let prev = &w[0].prefix;
            let th = BigUint::from(w[1].theta);
            let n = &w[1].n;
            let below = (n - 1u32) * &th <= *prev;
            let above = n * &th > *prev;
            if !(below && above) {
                return Err(Error::domain(format!(
                    "n_l out of range at l = {}",
                    w[1].ell
                )));
            }
        }
        Ok(())
    }

    /// Moran parameters with radii `2^-n_ℓ` and
    /// `N_ℓ = max(1, ⌊2^(n_ℓ λ_θ(ℓ))⌋)`, where `rates[j-1] = λ_j`.
    pub fn moran_params(&self, rates: &[f64]) -> Result<MoranParams> {
        let ln2 = std::f64::consts::LN_2;
        let mut ln_branches = Vec::with_capacity(self.rows.len());
        let mut ln_ratios = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let rate = *rates.get(r.theta - 1).ok_or_else(|| {
                Error::domain(format!("no rate for block {} (l = {})", r.theta, r.ell))
            })?;
            if !(rate.is_finite() && rate >= 0.0) {
                return Err(Error::domain(format!(
                    "rate {rate} must be finite and nonnegative"
                )));
            }
            let n = r.n.to_f64().unwrap_or(f64::INFINITY);
            let x = n * rate;
            // Below 2^53 the integer part is exact; above it the floor changes
            // ln N by less than 2^-52 relative.
            let ln_n = if x < 53.0 {
                x.exp2().floor().max(1.0).ln()
            } else {
                x * ln2
            };
            ln_branches.push(ln_n);
            ln_ratios.push(-n * ln2);
        }
        Ok(MoranParams {
            ln_branches,
            ln_ratios,
        })
    }

    pub fn to_csv(&self, s: Option<&[f64]>, digits: usize) -> String {
        let mut out = String::from("ell,theta,n_ell,s_ell\n");
        for (i, r) in self.rows.iter().enumerate() {
            let s_ell = s
                .and_then(|v| v.get(i))
                .map(|x| format!("{x:.digits$}"))
                .unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", r.ell, r.theta, r.n, s_ell));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailRow {
    pub ell: usize,
    /// `n_ℓ / (n_1 + … + n_{ℓ-1})`
    pub n_over_prefix: f64,
    /// `n_ℓ / n_{ℓ-1}`
    pub n_over_prev: f64,
    /// `θ(ℓ+1)/θ(ℓ)`; absent at the last level.
    pub theta_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitsReport {
    pub tail: Vec<TailRow>,
    /// `θ(ℓ_max)` when checked, `None` below 5.
    pub theta_checked_at: Option<usize>,
    /// All tail `θ` ratios within `[1 - δ, 1 + δ]`.
    pub theta_ratio_ok: Option<bool>,
}

fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    (ln_biguint(a) - ln_biguint(b)).exp()
}

/// Tail ratios for the last `tail` levels (at least two levels needed).
pub fn schedule_limits_report(s: &BlockSchedule, tail: usize, delta: f64) -> LimitsReport {
    let rows = &s.rows;
    let from = rows.len().saturating_sub(tail).max(1);
    let tail_rows: Vec<TailRow> = (from..rows.len())
        .map(|i| TailRow {
            ell: rows[i].ell,
            n_over_prefix: ratio(&rows[i].n, &rows[i - 1].prefix),
            n_over_prev: ratio(&rows[i].n, &rows[i - 1].n),
            theta_ratio: rows
                .get(i + 1)
                .map(|next| next.theta as f64 / rows[i].theta as f64),
        })
        .collect();
    let last_theta = rows.last().map_or(0, |r| r.theta);
    let (theta_checked_at, theta_ratio_ok) = if last_theta >= 5 {
        let ok = tail_rows
            .iter()
            .filter_map(|r| r.theta_ratio)
            .all(|t| (1.0 - delta..=1.0 + delta).contains(&t));
        (Some(last_theta), Some(ok))
    } else {
        (None, None)
    };
    LimitsReport {
        tail: tail_rows,
        theta_checked_at,
        theta_ratio_ok,
    }
}

/// `1` when the fractional part of `ℓ√2` lies in `[0, p)`, else `2`;
/// decided exactly.
pub fn rotation_target(ell: u64, p: &BigRational) -> u8 {
    let two_l2 = BigUint::from(ell) * BigUint::from(ell) * 2u32;
    let k = BigInt::from(two_l2.sqrt());
    // frac < p  ⇔  ℓ√2 < k + p  ⇔  2ℓ² < (k + p)²  (both sides positive)
    let bound = BigRational::from_integer(k) + p;
    let lhs = BigRational::from_integer(BigInt::from(two_l2));
    if !bound.is_positive() {
        return 2;
    }
    if lhs < &bound * &bound {
        1
    } else {
        2
    }
}

/// Parsed schedule file.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleInput {
    pub l: Vec<u64>,
    /// `λ_j` per block, when supplied.
    pub rates: Option<Vec<f64>>,
}

/// Reads `L: 0 2 3 5 …` and an optional `rates: λ_1 λ_2 …` line; `#`
/// starts a comment.
pub fn parse_schedule(text: &str) -> Result<ScheduleInput> {
    let mut l = None;
    let mut rates = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(line_no, "expected 'key: values'"))?;
        match key.trim() {
            "L" => {
                if l.is_some() {
                    return Err(Error::parse(line_no, "duplicate L line"));
                }
                let v = rest
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<u64>()
                            .map_err(|e| Error::parse(line_no, format!("'{t}': {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if v.len() > 1 << 20 {
                    return Err(Error::parse(line_no, "too many entries"));
                }
                l = Some(v);
            }
            "rates" => {
                if rates.is_some() {
                    return Err(Error::parse(line_no, "duplicate rates line"));
                }
                let v = rest
                    .split_whitespace()
                    .map(|t| {
                        parse_rational(t)
                            .ok()
                            .and_then(|r| crate::numeric::rational_to_f64(&r).into())
                            .filter(|x: &f64| x.is_finite())
                            .ok_or_else(|| Error::parse(line_no, format!("bad rate '{t}'")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                rates = Some(v);
            }
            other => return Err(Error::parse(line_no, format!("unknown key '{other}'"))),
        }
    }
    let l = l.ok_or_else(|| Error::parse(text.lines().count().max(1), "missing L line"))?;
    Ok(ScheduleInput { l, rates })
}
