//! Built-in reproduction checks. Each check is independent; a failing or
//! erroring check is recorded and the rest still run.

use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use salemfrac::algebraic::{salem_identity_holds, verify_salem_growth};
use salemfrac::ifs::{class_members, format_word, heavy_inequality, parse_word, EqualRatioIfs};
use salemfrac::spectrum::{
    dim_attractor_is_full, spectrum_boxes, tau_from_boxes, tau_prime_infty_upper_bound,
    three_map_casestudy, SpectrumOptions,
};

use crate::{class_multiplicity, CliError, CliResult};

pub const CHECK_NAMES: [&str; 6] = [
    "class-words",
    "heavy-class",
    "salem-growth",
    "casestudy",
    "slope-bound",
    "tau-anchor",
];

/// Word whose level-15 class under `λ_4` is listed in [`CLASS_WORDS`].
pub const CLASS_WORD: &str = "122211121112221";

pub const CLASS_WORDS: [&str; 10] = [
    "122122122211112",
    "122122211112221",
    "122122211121112",
    "122211112221221",
    "122211121112221",
    "122211121121112",
    "211112221221221",
    "211121112221221",
    "211121121112221",
    "211121121121112",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,passed,detail\n");
        for c in &self.checks {
            s.push_str(&format!(
                "{},{},\"{}\"\n",
                c.name,
                c.passed,
                c.detail.replace('"', "'")
            ));
        }
        s
    }
}

/// Runs the named checks (all of them when `only` is empty) in a fixed order.
pub fn run_checks(only: &[String], cache: Option<&Path>) -> CliResult<VerifyReport> {
    if let Some(bad) = only.iter().find(|n| !CHECK_NAMES.contains(&n.as_str())) {
        return Err(CliError::Config(format!(
            "unknown check {bad:?}; known: {}",
            CHECK_NAMES.join(", ")
        )));
    }
    let checks: Vec<CheckResult> = CHECK_NAMES
        .iter()
        .filter(|n| only.is_empty() || only.iter().any(|o| o == *n))
        .map(|&name| {
            let (passed, detail) = match run_one(name, cache) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult {
                name: name.into(),
                passed,
                detail,
            }
        })
        .collect();
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { checks, all_passed })
}

fn run_one(name: &str, cache: Option<&Path>) -> CliResult<(bool, String)> {
    match name {
        "class-words" => class_words(),
        "heavy-class" => heavy_class(),
        "salem-growth" => salem_growth(),
        "casestudy" => casestudy(),
        "slope-bound" => slope_bound(),
        "tau-anchor" => tau_anchor(cache),
        _ => unreachable!("names validated by run_checks"),
    }
}

fn class_words() -> CliResult<(bool, String)> {
    let ifs = EqualRatioIfs::salem_bernoulli(4)?;
    let word = parse_word(CLASS_WORD)?;
    let mult = class_multiplicity(&ifs, &word)?;
    let target = ifs.compose_word(&word)?.translation;
    let members: Vec<String> = class_members(&ifs, word.len(), &target)?
        .iter()
        .map(|w| format_word(w))
        .collect();
    let ok = mult == 10 && members == CLASS_WORDS;
    Ok((
        ok,
        format!("multiplicity {mult}, {} members listed", members.len()),
    ))
}

fn heavy_class() -> CliResult<(bool, String)> {
    let ifs = EqualRatioIfs::salem_bernoulli(4)?;
    let mut ok = heavy_inequality(&ifs, 10, 15);
    let mut detail = format!("10/2^15 > lambda_4^15: {ok}");
    for n in 5..=8 {
        let mut word = vec![2; n + 1];
        word[0] = 1;
        word[n] = 1;
        let ifs = EqualRatioIfs::salem_bernoulli(n)?;
        let mult = class_multiplicity(&ifs, &word)?;
        let holds = mult >= 2 && heavy_inequality(&ifs, 2, n + 1);
        ok &= holds;
        detail.push_str(&format!("; n={n}: multiplicity {mult}, inequality {holds}"));
    }
    Ok((ok, detail))
}

fn salem_growth() -> CliResult<(bool, String)> {
    let growth = verify_salem_growth(4, 40)?;
    let pattern = growth.iter().all(|&(n, v)| v == (n >= 5));
    let mut identity = true;
    for n in 4..=40 {
        identity &= salem_identity_holds(n)?;
    }
    Ok((
        pattern && identity,
        format!("growth pattern {pattern}, identity {identity} for n = 4..40"),
    ))
}

fn casestudy() -> CliResult<(bool, String)> {
    let r = three_map_casestudy();
    let f_ok = (r.f_at_1_5_squared - 0.34387).abs() <= 5e-5;
    let g_ok = (r.weighted_geometric_mean - 0.34042).abs() <= 5e-5;
    let ok = f_ok && g_ok && r.f_at_one_is_one && r.ratio_increasing && r.transversality_holds;
    Ok((
        ok,
        format!(
            "f(1.5)^2 = {:.6}, geometric mean = {:.6}, ratio increasing {}, guard {}",
            r.f_at_1_5_squared,
            r.weighted_geometric_mean,
            r.ratio_increasing,
            r.transversality_holds
        ),
    ))
}

fn slope_bound() -> CliResult<(bool, String)> {
    let ifs = EqualRatioIfs::salem_bernoulli(4)?;
    let b = tau_prime_infty_upper_bound(&ifs, 15)?;
    let full = dim_attractor_is_full(&ifs);
    Ok((
        b.certified_below_one && full,
        format!(
            "bound {:.6} at k = {} (certified < 1: {}), attractor is an interval: {full}",
            b.bound, b.level, b.certified_below_one
        ),
    ))
}

fn tau_anchor(cache: Option<&Path>) -> CliResult<(bool, String)> {
    let ifs = EqualRatioIfs::salem_bernoulli(4)?;
    let opts = SpectrumOptions {
        cache_dir: cache.map(Path::to_path_buf),
        ..SpectrumOptions::default()
    };
    let (boxes, meta) = spectrum_boxes(&ifs, 12, &opts)?;
    let tau = tau_from_boxes(&boxes, &BigRational::from_integer(1.into()));
    Ok((
        tau == 0.0,
        format!("tau_hat(1) = {tau} at m = 12 from {} atoms", meta.atoms),
    ))
}
