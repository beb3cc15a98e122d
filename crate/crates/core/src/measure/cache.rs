//! Versioned text cache for atom tables.
//!
//! ```text
//! salemfrac-atoms 1
//! modulus 1 -1 -1 -1 1        (or: ratio 1/3)
//! digest <sha-256 of ratio, maps and weights>
//! depth 15
//! atoms 19101
//! 16 -6 -20 -30 10 32768       (coordinates, weight numerator, denominator)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{discretize_with_budget, AtomMeasure};
use crate::algebraic::Coords;
use crate::ifs::EqualRatioIfs;
use crate::numeric::parse_rational;
use crate::{Error, Result};

pub const CACHE_VERSION: u32 = 1;

const MAGIC: &str = "salemfrac-atoms";

fn ring_line(ifs: &EqualRatioIfs) -> String {
    let ring = ifs.ring();
    match ring.modulus() {
        Some(m) => {
            let c: Vec<String> = m.coeffs().iter().map(|c| c.to_string()).collect();
            format!("modulus {}", c.join(" "))
        }
        None => format!(
            "ratio {}",
            ring.generator().as_rational().expect("rational generator")
        ),
    }
}

pub fn write_atom_cache(measure: &AtomMeasure, ifs: &EqualRatioIfs) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {CACHE_VERSION}");
    let _ = writeln!(out, "{}", ring_line(ifs));
    let _ = writeln!(out, "digest {}", ifs.digest());
    let _ = writeln!(out, "depth {}", measure.depth());
    let _ = writeln!(out, "atoms {}", measure.len());
    let den = measure.weight_den();
    for a in measure.atoms() {
        let _ = writeln!(out, "{} {} {den}", a.position, a.weight_num);
    }
    out
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    key: &str,
) -> Result<(usize, &'a str)> {
    let (no, line) = lines
        .next()
        .ok_or_else(|| Error::Cache(format!("missing `{key}` header")))?;
    let rest = line
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| Error::Cache(format!("line {no}: expected `{key}`")))?;
    Ok((no, rest.trim()))
}

/// Parses and revalidates a cached atom table for `ifs`.
pub fn parse_atom_cache(text: &str, ifs: &EqualRatioIfs) -> Result<AtomMeasure> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (no, version) = header(&mut lines, MAGIC)?;
    if version != CACHE_VERSION.to_string() {
        return Err(Error::Cache(format!(
            "line {no}: unsupported version {version:?}"
        )));
    }
    let (no, line) = lines
        .next()
        .ok_or_else(|| Error::Cache("missing ring header".into()))?;
    if line.trim() != ring_line(ifs) {
        return Err(Error::Cache(format!(
            "line {no}: ring does not match the system"
        )));
    }
    let (no, digest) = header(&mut lines, "digest")?;
    if digest != ifs.digest() {
        return Err(Error::Cache(format!(
            "line {no}: digest does not match the system"
        )));
    }
    let (no, depth) = header(&mut lines, "depth")?;
    let depth: usize = depth
        .parse()
        .map_err(|_| Error::Cache(format!("line {no}: bad depth")))?;
    if depth > 4096 {
        return Err(Error::Cache(format!("line {no}: depth out of range")));
    }
    let (no, count) = header(&mut lines, "atoms")?;
    let count: usize = count
        .parse()
        .map_err(|_| Error::Cache(format!("line {no}: bad atom count")))?;

    let ring = ifs.ring();
    let rank = ring.rank();
    let expected_den = ifs.weight_den().checked_pow(depth as u32);
    let mut raw: Vec<(Coords, u128)> = Vec::new();
    let mut total: u128 = 0;
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |what: &str| Error::Cache(format!("line {no}: {what}"));
        let coord_fields = if ring.modulus().is_some() { rank } else { 1 };
        if fields.len() != coord_fields + 2 {
            return Err(bad("wrong number of fields"));
        }
        let coords = if ring.modulus().is_some() {
            let v = fields[..rank]
                .iter()
                .map(|f| f.parse::<i64>().map_err(|_| bad("bad coordinate")))
                .collect::<Result<Vec<_>>>()?;
            ring.coords_from_ints(&v).map_err(|e| bad(&e.to_string()))?
        } else {
            let r: BigRational = parse_rational(fields[0]).map_err(|e| bad(&e.to_string()))?;
            Coords::Rat(r)
        };
        let num: u128 = fields[coord_fields]
            .parse()
            .map_err(|_| bad("bad weight numerator"))?;
        let den: u128 = fields[coord_fields + 1]
            .parse()
            .map_err(|_| bad("bad weight denominator"))?;
        if Some(den) != expected_den {
            return Err(bad("weight denominator does not match the depth"));
        }
        if num == 0 {
            return Err(bad("zero weight"));
        }
        total = total
            .checked_add(num)
            .ok_or_else(|| bad("weights overflow"))?;
        raw.push((coords, num));
        if raw.len() > count {
            return Err(bad("more atoms than declared"));
        }
    }
    if raw.len() != count {
        return Err(Error::Cache(format!(
            "declared {count} atoms, found {}",
            raw.len()
        )));
    }
    let den = expected_den.ok_or_else(|| Error::Cache("denominator overflow".into()))?;
    if total != den {
        return Err(Error::Cache(format!(
            "weights sum to {}, not 1",
            BigRational::new(BigInt::from(total), BigInt::from(den))
        )));
    }
    let mut keys: Vec<&Coords> = raw.iter().map(|r| &r.0).collect();
    keys.sort_unstable();
    if keys.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Cache("duplicate atom positions".into()));
    }
    AtomMeasure::from_parts(ifs, depth, den, raw).map_err(|e| Error::Cache(e.to_string()))
}

pub fn cache_file_name(ifs: &EqualRatioIfs, depth: usize) -> String {
    format!("{}-n{depth}.atoms", &ifs.digest()[..16])
}

/// Where a measure came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Disabled,
    Hit(PathBuf),
    Written(PathBuf),
    /// The cached file failed revalidation and was recomputed.
    Replaced(PathBuf, String),
}

/// Loads the depth-`n` atoms from `dir` if a valid cache exists; otherwise
/// computes them and writes the cache.
pub fn load_or_discretize(
    ifs: &EqualRatioIfs,
    depth: usize,
    budget: usize,
    dir: Option<&Path>,
) -> Result<(AtomMeasure, CacheOutcome)> {
    let Some(dir) = dir else {
        return Ok((
            discretize_with_budget(ifs, depth, budget)?,
            CacheOutcome::Disabled,
        ));
    };
    let path = dir.join(cache_file_name(ifs, depth));
    let mut rejected = None;
    if let Ok(text) = fs::read_to_string(&path) {
        match parse_atom_cache(&text, ifs) {
            Ok(m) => return Ok((m, CacheOutcome::Hit(path))),
            Err(e) => rejected = Some(e.to_string()),
        }
    }
    let m = discretize_with_budget(ifs, depth, budget)?;
    fs::create_dir_all(dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
    fs::write(&path, write_atom_cache(&m, ifs))
        .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
    let outcome = match rejected {
        Some(why) => CacheOutcome::Replaced(path, why),
        None => CacheOutcome::Written(path),
    };
    Ok((m, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::discretize;

    #[test]
    fn round_trip() {
        for ifs in [
            EqualRatioIfs::cantor(),
            EqualRatioIfs::salem_bernoulli(4).unwrap(),
        ] {
            let m = discretize(&ifs, 9).unwrap();
            let text = write_atom_cache(&m, &ifs);
            let back = parse_atom_cache(&text, &ifs).unwrap();
            assert_eq!(back.atoms(), m.atoms());
            assert_eq!(back.weight_den(), m.weight_den());
        }
    }

    #[test]
    fn corruption_is_rejected() {
        let ifs = EqualRatioIfs::salem_bernoulli(4).unwrap();
        let m = discretize(&ifs, 6).unwrap();
        let text = write_atom_cache(&m, &ifs);
        // Change one weight numerator.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let last = lines.len() - 1;
        let mut f: Vec<String> = lines[last].split(' ').map(String::from).collect();
        let k = f.len() - 2;
        f[k] = (f[k].parse::<u128>().unwrap() + 1).to_string();
        lines[last] = f.join(" ");
        assert!(matches!(
            parse_atom_cache(&lines.join("\n"), &ifs),
            Err(Error::Cache(_))
        ));
        // Another system's digest.
        let other = EqualRatioIfs::salem_bernoulli(5).unwrap();
        assert!(parse_atom_cache(&text, &other).is_err());
        // Truncation.
        let cut: String = text.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(parse_atom_cache(&cut, &ifs).is_err());
        assert!(parse_atom_cache("", &ifs).is_err());
    }

    #[test]
    fn cache_directory_flow() {
        let dir = std::env::temp_dir().join(format!("salemfrac-cache-test-{}", std::process::id()));
        let ifs = EqualRatioIfs::golden_bernoulli().unwrap();
        let (_, first) = load_or_discretize(&ifs, 7, 1000, Some(&dir)).unwrap();
        assert!(matches!(first, CacheOutcome::Written(_)));
        let (_, second) = load_or_discretize(&ifs, 7, 1000, Some(&dir)).unwrap();
        assert!(matches!(second, CacheOutcome::Hit(_)));
        let path = dir.join(cache_file_name(&ifs, 7));
        fs::write(&path, "salemfrac-atoms 1\ngarbage\n").unwrap();
        let (m, third) = load_or_discretize(&ifs, 7, 1000, Some(&dir)).unwrap();
        assert!(matches!(third, CacheOutcome::Replaced(..)));
        assert!(m.total_weight() == BigRational::from_integer(1.into()));
        let _ = fs::remove_dir_all(&dir);
    }
}
