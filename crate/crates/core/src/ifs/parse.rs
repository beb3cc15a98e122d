//! Parser for the line-oriented IFS description format.
//!
//! ```text
//! # Bernoulli convolution for 1/β_4
//! modulus: 1 -1 -1 -1 1        # ascending coefficients, monic
//! ratio: root in (0, 1)        # or: ratio: rational 1/3
//! map: -1 0 0 0                # translation in the basis 1, λ, λ², …
//! map: 1 0 0 0
//! weight: 1/2
//! weight: 1/2
//! ```
//!
//! With a rational ratio a translation may also be given as
//! `map: value p/q`.

use num_rational::BigRational;

use super::EqualRatioIfs;
use crate::algebraic::{Coords, IntPoly, Interval, Ring};
use crate::numeric::parse_rational;
use crate::{Error, Result};

const MAX_DEGREE: usize = 32;
const MAX_MAPS: usize = 1024;

enum Ratio {
    Root(Interval),
    Rational(BigRational),
}

enum MapSpec {
    Coords(Vec<i64>),
    Value(BigRational),
}

pub fn parse_ifs(text: &str) -> Result<EqualRatioIfs> {
    let mut modulus: Option<(usize, Vec<i64>)> = None;
    let mut ratio: Option<(usize, Ratio)> = None;
    let mut maps: Vec<(usize, MapSpec)> = Vec::new();
    let mut weights: Vec<(usize, BigRational)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(line_no, "expected `key: value`"))?;
        let value = value.trim();
        match key.trim() {
            "modulus" => {
                if modulus.is_some() {
                    return Err(Error::parse(line_no, "duplicate modulus"));
                }
                let c = parse_ints(value, line_no)?;
                if c.len() < 2 || c.len() > MAX_DEGREE + 1 {
                    return Err(Error::parse(
                        line_no,
                        format!("modulus degree must be between 1 and {MAX_DEGREE}"),
                    ));
                }
                if *c.last().unwrap() != 1 {
                    return Err(Error::parse(line_no, "modulus must be monic"));
                }
                modulus = Some((line_no, c));
            }
            "ratio" => {
                if ratio.is_some() {
                    return Err(Error::parse(line_no, "duplicate ratio"));
                }
                ratio = Some((line_no, parse_ratio(value, line_no)?));
            }
            "map" => {
                if maps.len() >= MAX_MAPS {
                    return Err(Error::parse(line_no, "too many maps"));
                }
                let spec = match value.strip_prefix("value") {
                    Some(rest) => MapSpec::Value(
                        parse_rational(rest).map_err(|e| Error::parse(line_no, e.to_string()))?,
                    ),
                    None => {
                        let c = parse_ints(value, line_no)?;
                        if c.is_empty() {
                            return Err(Error::parse(line_no, "empty translation"));
                        }
                        if c.len() > MAX_DEGREE + 1 {
                            return Err(Error::parse(
                                line_no,
                                "translation has too many coordinates",
                            ));
                        }
                        MapSpec::Coords(c)
                    }
                };
                maps.push((line_no, spec));
            }
            "weight" => {
                let w = parse_rational(value).map_err(|e| Error::parse(line_no, e.to_string()))?;
                weights.push((line_no, w));
            }
            other => return Err(Error::parse(line_no, format!("unknown key {other:?}"))),
        }
    }

    let end = text.lines().count() + 1;
    let (ratio_line, ratio) = ratio.ok_or_else(|| Error::parse(end, "missing `ratio:` line"))?;
    let ring = match ratio {
        Ratio::Root(iv) => {
            let (_, m) = modulus
                .as_ref()
                .ok_or_else(|| Error::parse(ratio_line, "`ratio: root` needs a `modulus:` line"))?;
            Ring::integral_root_in(IntPoly::from_i64(m), &iv)
                .map_err(|e| Error::parse(ratio_line, e.to_string()))?
        }
        Ratio::Rational(r) => {
            if let Some((line, _)) = modulus {
                return Err(Error::parse(line, "a rational ratio takes no modulus"));
            }
            Ring::rational(r)
        }
    };
    if maps.len() != weights.len() {
        let line = weights.last().or(None).map(|w| w.0).unwrap_or(end);
        return Err(Error::parse(
            line,
            format!("{} maps but {} weights", maps.len(), weights.len()),
        ));
    }
    let translations = maps
        .into_iter()
        .map(|(line, spec)| {
            let c: Result<Coords> = match spec {
                MapSpec::Coords(v) => {
                    if ring.modulus().is_some() && v.len() > ring.rank() {
                        return Err(Error::parse(
                            line,
                            format!("translation has more than {} coordinates", ring.rank()),
                        ));
                    }
                    ring.coords_from_ints(&v)
                }
                MapSpec::Value(r) => ring.rational_const(&r),
            };
            c.map_err(|e| Error::parse(line, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let weights = weights.into_iter().map(|(_, w)| w).collect();
    EqualRatioIfs::new(ring, translations, weights).map_err(|e| Error::parse(end, e.to_string()))
}

fn parse_ints(value: &str, line: usize) -> Result<Vec<i64>> {
    value
        .split_whitespace()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| Error::parse(line, format!("expected an integer, found {t:?}")))
        })
        .collect()
}

fn parse_ratio(value: &str, line: usize) -> Result<Ratio> {
    if let Some(rest) = value.strip_prefix("rational") {
        let r = parse_rational(rest).map_err(|e| Error::parse(line, e.to_string()))?;
        return Ok(Ratio::Rational(r));
    }
    let rest = value
        .strip_prefix("root in")
        .ok_or_else(|| Error::parse(line, "expected `root in (lo, hi)` or `rational p/q`"))?
        .trim();
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::parse(line, "expected a parenthesised interval"))?;
    let (lo, hi) = inner
        .split_once(',')
        .ok_or_else(|| Error::parse(line, "expected `lo, hi`"))?;
    let lo = parse_rational(lo).map_err(|e| Error::parse(line, e.to_string()))?;
    let hi = parse_rational(hi).map_err(|e| Error::parse(line, e.to_string()))?;
    let iv = Interval::new(lo, hi).map_err(|e| Error::parse(line, e.to_string()))?;
    Ok(Ratio::Root(iv))
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q4: &str = "\
# Bernoulli convolution, λ = 1/β_4
modulus: 1 -1 -1 -1 1
ratio: root in (0, 1)
map: -1
map: 1 0 0 0
weight: 1/2
weight: 0.5
";

    #[test]
    fn parses_salem_system() {
        let ifs = parse_ifs(Q4).unwrap();
        assert_eq!(ifs.len(), 2);
        assert_eq!(
            ifs.digest(),
            EqualRatioIfs::salem_bernoulli(4).unwrap().digest()
        );
    }

    #[test]
    fn round_trips_through_text() {
        for ifs in [
            EqualRatioIfs::cantor(),
            EqualRatioIfs::golden_bernoulli().unwrap(),
            EqualRatioIfs::salem_bernoulli(5).unwrap(),
        ] {
            let back = parse_ifs(&ifs.to_text()).unwrap();
            assert_eq!(back.digest(), ifs.digest());
        }
    }

    #[test]
    fn rational_maps_by_coordinates() {
        let text = "ratio: rational 1/3\nmap: 0\nmap: 0 2\nweight: 1/2\nweight: 1/2\n";
        assert_eq!(
            parse_ifs(text).unwrap().digest(),
            EqualRatioIfs::cantor().digest()
        );
    }

    fn line_of(text: &str) -> usize {
        match parse_ifs(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of("ratio: rational 1/3\nfoo: 1\n"), 2);
        assert_eq!(line_of("modulus: 1 -1 -1 -1 2\n"), 1);
        assert_eq!(line_of("\n\nmodulus: 1 x\n"), 3);
        assert_eq!(line_of("modulus: 1 1\nratio: root in (0, 1)\n"), 2);
        assert_eq!(
            line_of("ratio: rational 1/3\nmap: 0\nmap: 0\nweight: 1/2\nweight: 1/2\n"),
            6
        );
        assert_eq!(line_of("ratio: rational 1/3\nratio: rational 1/2\n"), 2);
        assert_eq!(line_of("ratio: root in (1, 0)\n"), 1);
        assert_eq!(line_of("map: 1\n"), 2);
    }
}
