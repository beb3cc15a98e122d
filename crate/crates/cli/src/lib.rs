//! Command-line front end for [`salemfrac`].
//!
//! [`run`] executes a parsed [`Cli`] and returns the text destined for
//! stdout together with the process exit code, so the binary stays a thin
//! wrapper and the commands can be exercised in-process.

mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use salemfrac::algebraic::{
    salem_beta, salem_lambda, salem_polynomial, AlgebraicNumber, IntPoly, Ring,
};
use salemfrac::awsc::{awsc_profile, yset_min_gap, WindowConvention};
use salemfrac::ifs::{
    class_members, enumerate_classes, find_heavy_class, format_word, heavy_inequality, parse_ifs,
    parse_word, EqualRatioIfs, DEFAULT_ENTRY_BUDGET,
};
use salemfrac::moran::{
    moran_dimension, parse_schedule, schedule_from_l, schedule_limits_report, MoranParams,
};
use salemfrac::numeric::{parse_grid, parse_rational};
use salemfrac::spectrum::{
    legendre, tau_curve_with, three_map_casestudy, LegendreCurve, SpectrumMeta, SpectrumOptions,
};

pub use verify::{run_checks, CheckResult, VerifyReport, CHECK_NAMES};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] salemfrac::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(salemfrac::Error::Budget { .. }) => EXIT_BUDGET,
            _ => EXIT_CONFIG,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "salemfrac",
    version,
    about = "Multifractal computations for equal-ratio self-similar measures"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Output format; `verify` defaults to json, everything else to csv.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Directory for atom-table caches.
    #[arg(long, global = true, env = "SALEMFRAC_CACHE")]
    pub cache: Option<PathBuf>,
    /// Worker threads for the parallel stages.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Entry budget for class tables.
    #[arg(long, global = true, default_value_t = DEFAULT_ENTRY_BUDGET)]
    pub budget: usize,
    /// Enclosure width / decimal resolution, e.g. `1e-9` or `1/1000`.
    #[arg(long, global = true, value_parser = positive_rational)]
    pub precision: Option<BigRational>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certified enclosures of β_n and λ_n = 1/β_n.
    Salem {
        #[arg(long)]
        n: usize,
    },
    /// Run the built-in reproduction checks.
    Verify {
        /// Comma-separated subset of checks.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// `L^q` spectrum estimate on a q grid.
    Spectrum(SpectrumArgs),
    /// Legendre transform of the spectrum estimate.
    Legendre(SpectrumArgs),
    /// Word-equivalence classes at level k.
    Classes {
        #[arg(long)]
        ifs: PathBuf,
        #[arg(long)]
        k: usize,
        /// List the members of the class containing this word.
        #[arg(long, conflicts_with = "heavy")]
        word: Option<String>,
        /// List the members of the heaviest class.
        #[arg(long)]
        heavy: bool,
    },
    /// Window-count profile `t_n`.
    Awsc {
        #[arg(long)]
        ifs: PathBuf,
        /// Inclusive range `LO:HI`; empty when HI < LO.
        #[arg(long)]
        n_range: String,
        #[arg(long, default_value = "dyadic-box", value_parser = convention)]
        convention: WindowConvention,
        /// Exit with status 4 unless `log2(t_n)/n` at the last n is at most this.
        #[arg(long)]
        max_ratio: Option<f64>,
    },
    /// Smallest gap of the signed digit set `{Σ ε_i β^i : |ε_i| ≤ m}`.
    Yset {
        /// Use the Salem number β_n.
        #[arg(long, conflicts_with = "modulus")]
        n: Option<usize>,
        /// Ascending coefficients of a monic polynomial; β is its largest real root.
        #[arg(long, allow_hyphen_values = true)]
        modulus: Option<String>,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        degree_cap: u32,
    },
    /// Moran dimensions and block schedules.
    Moran {
        /// Schedule file with `L:` and optional `rates:` lines.
        #[arg(long, conflicts_with_all = ["branches", "ratios"])]
        schedule: Option<PathBuf>,
        #[arg(long)]
        ell_max: usize,
        /// Periodic branch counts, comma separated.
        #[arg(long, value_delimiter = ',')]
        branches: Vec<u64>,
        /// Periodic contraction ratios, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = positive_rational)]
        ratios: Vec<BigRational>,
        #[arg(long, default_value_t = 10)]
        tail: usize,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
    },
    /// Closed-form checks for the three-map family.
    Casestudy,
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub ifs: PathBuf,
    #[arg(long)]
    pub m: u32,
    #[arg(long, default_value = "0.5:4:0.25")]
    pub q_grid: String,
    /// Cap on the discretization depth; bypasses the scale guard when it binds.
    #[arg(long)]
    pub max_depth: Option<usize>,
}

fn positive_rational(s: &str) -> Result<BigRational, String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    if !r.is_positive() {
        return Err(format!("{s} is not positive"));
    }
    Ok(r)
}

fn convention(s: &str) -> Result<WindowConvention, String> {
    s.parse().map_err(|e: salemfrac::Error| e.to_string())
}

/// JSON wrapper around every command result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    fn render(command: &str, result: T) -> String {
        let env = Envelope {
            tool: "salemfrac".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            result,
        };
        let mut s = serde_json::to_string_pretty(&env).expect("serializable");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    /// Exact rational endpoints.
    pub lo: String,
    pub hi: String,
    /// Outward-rounded decimal rendering.
    pub decimal: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SalemReport {
    pub n: usize,
    /// Ascending coefficients of `Q_n`.
    pub coefficients: Vec<String>,
    pub beta: Enclosure,
    pub lambda: Enclosure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub translation: String,
    pub multiplicity: String,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub level: usize,
    pub translation: String,
    pub multiplicity: String,
    /// `multiplicity / ℓ^k > λ^k`, decided exactly.
    pub exceeds_lambda_power: bool,
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendreReport {
    pub meta: SpectrumMeta,
    pub curve: LegendreCurve,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapOutput {
    pub beta: String,
    pub m: u32,
    pub degree_cap: u32,
    pub elements: usize,
    pub gap: Enclosure,
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    /// Diagnostics for stderr.
    pub notes: Vec<String>,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            notes: Vec::new(),
            code: EXIT_OK,
        }
    }
}

/// Executes a command inside a thread pool sized by `--threads`.
pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.global.threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    let g = &cli.global;
    let format = g.format.unwrap_or(match cli.command {
        Command::Verify { .. } => Format::Json,
        _ => Format::Csv,
    });
    let precision = g
        .precision
        .clone()
        .unwrap_or_else(|| BigRational::new(1.into(), 1_000_000_000_000u64.into()));
    let digits = decimal_digits(&precision);
    match &cli.command {
        Command::Salem { n } => salem(*n, &precision, format),
        Command::Verify { only } => {
            let report = run_checks(only, g.cache.as_deref())?;
            let code = if report.all_passed {
                EXIT_OK
            } else {
                EXIT_VERIFY
            };
            let stdout = match format {
                Format::Json => Envelope::render("verify", &report),
                Format::Csv => report.to_csv(),
            };
            Ok(Outcome {
                stdout,
                notes: Vec::new(),
                code,
            })
        }
        Command::Spectrum(a) => spectrum(a, g, format, digits),
        Command::Legendre(a) => legendre_cmd(a, g, format, digits),
        Command::Classes {
            ifs,
            k,
            word,
            heavy,
        } => classes(
            &load_ifs(ifs)?,
            *k,
            word.as_deref(),
            *heavy,
            g.budget,
            format,
        ),
        Command::Awsc {
            ifs,
            n_range,
            convention,
            max_ratio,
        } => {
            let (lo, hi) = parse_range(n_range)?;
            let profile = awsc_profile(&load_ifs(ifs)?, lo..=hi, *convention, g.budget)?;
            let stdout = match format {
                Format::Json => Envelope::render("awsc", &profile),
                Format::Csv => profile.to_csv(digits),
            };
            let mut out = Outcome::ok(stdout);
            if let Some(bound) = max_ratio {
                if !profile.last_ratio_at_most(*bound) {
                    out.notes
                        .push(format!("log2(t_n)/n exceeds {bound} at the last n"));
                    out.code = EXIT_VERIFY;
                }
            }
            Ok(out)
        }
        Command::Yset {
            n,
            modulus,
            m,
            degree_cap,
        } => yset(
            *n,
            modulus.as_deref(),
            *m,
            *degree_cap,
            g.budget,
            digits,
            format,
        ),
        Command::Moran {
            schedule,
            ell_max,
            branches,
            ratios,
            tail,
            delta,
        } => match schedule {
            Some(path) => moran_schedule(path, *ell_max, *tail, *delta, digits, format),
            None => moran_periodic(branches, ratios, *ell_max, digits, format),
        },
        Command::Casestudy => {
            let r = three_map_casestudy();
            let stdout = match format {
                Format::Json => Envelope::render("casestudy", &r),
                Format::Csv => {
                    let (lo, hi) = r.local_dimension_interval;
                    let rows = [
                        ("f_at_one_is_one", r.f_at_one_is_one.to_string()),
                        ("f_at_1_5_squared", format!("{:.6}", r.f_at_1_5_squared)),
                        (
                            "weighted_geometric_mean",
                            format!("{:.6}", r.weighted_geometric_mean),
                        ),
                        (
                            "lower_lambda_above_mean",
                            r.lower_lambda_above_mean.to_string(),
                        ),
                        ("ratio_increasing", r.ratio_increasing.to_string()),
                        ("lambda_max", r.lambda_max.to_string()),
                        (
                            "lambda_max_below_f_squared",
                            r.lambda_max_below_f_squared.to_string(),
                        ),
                        ("transversality_holds", r.transversality_holds.to_string()),
                        ("lambda", r.lambda.to_string()),
                        ("local_dimension_lo", format!("{lo:.6}")),
                        ("local_dimension_hi", format!("{hi:.6}")),
                        ("moment_branch_active", r.moment_branch_active.to_string()),
                    ];
                    let mut s = String::from("quantity,value\n");
                    for (k, v) in rows {
                        s.push_str(&format!("{k},{v}\n"));
                    }
                    s
                }
            };
            Ok(Outcome::ok(stdout))
        }
    }
}

/// Smallest `d` with `10^-d ≤ precision`, capped at 200.
pub fn decimal_digits(precision: &BigRational) -> usize {
    let mut d = 0;
    let mut scale = BigRational::one();
    let ten = BigRational::from_integer(10.into());
    while &scale > precision && d < 200 {
        scale /= &ten;
        d += 1;
    }
    d
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_ifs(path: &Path) -> CliResult<EqualRatioIfs> {
    parse_ifs(&read(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn parse_range(s: &str) -> CliResult<(u32, u32)> {
    let bad = || CliError::Config(format!("range must be LO:HI, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn enclosure(a: &AlgebraicNumber, digits: usize) -> Enclosure {
    let e = a.enclosure();
    Enclosure {
        lo: e.lo().to_string(),
        hi: e.hi().to_string(),
        decimal: e.to_decimal(digits),
    }
}

fn salem(n: usize, precision: &BigRational, format: Format) -> CliResult<Outcome> {
    let poly = salem_polynomial(n)?;
    let digits = decimal_digits(precision) + 2;
    let beta = salem_beta(n)?.refine(precision);
    let lambda = salem_lambda(n)?.refine(precision);
    let report = SalemReport {
        n,
        coefficients: poly.coeffs().iter().map(|c| c.to_string()).collect(),
        beta: enclosure(&beta, digits),
        lambda: enclosure(&lambda, digits),
    };
    Ok(Outcome::ok(match format {
        Format::Json => Envelope::render("salem", &report),
        Format::Csv => format!(
            "n,coefficients,beta,lambda\n{},{},\"{}\",\"{}\"\n",
            n,
            report.coefficients.join(" "),
            report.beta.decimal,
            report.lambda.decimal
        ),
    }))
}

fn spectrum_options(g: &GlobalArgs, a: &SpectrumArgs) -> SpectrumOptions {
    SpectrumOptions {
        max_depth: a.max_depth,
        budget: g.budget,
        cache_dir: g.cache.clone(),
        ..SpectrumOptions::default()
    }
}

fn spectrum(a: &SpectrumArgs, g: &GlobalArgs, format: Format, digits: usize) -> CliResult<Outcome> {
    let ifs = load_ifs(&a.ifs)?;
    let grid = parse_grid(&a.q_grid)?;
    let curve = tau_curve_with(&ifs, &grid, a.m, &spectrum_options(g, a))?;
    let mut notes = curve.warnings.clone();
    if curve.meta.guard_overridden {
        notes.push(format!(
            "depth capped at {}; scale guard bypassed",
            curve.meta.depth
        ));
    }
    if let Some(s) = curve.chord_slope_at_max() {
        notes.push(format!("chord slope at q_max: {s:.6}"));
    }
    let stdout = match format {
        Format::Json => Envelope::render("spectrum", &curve),
        Format::Csv => curve.to_csv(digits),
    };
    Ok(Outcome {
        stdout,
        notes,
        code: EXIT_OK,
    })
}

fn legendre_cmd(
    a: &SpectrumArgs,
    g: &GlobalArgs,
    format: Format,
    digits: usize,
) -> CliResult<Outcome> {
    let ifs = load_ifs(&a.ifs)?;
    let grid = parse_grid(&a.q_grid)?;
    let curve = tau_curve_with(&ifs, &grid, a.m, &spectrum_options(g, a))?;
    let conj = legendre(&curve)?;
    let notes = vec![format!(
        "alpha range [{:.6}, {:.6}]",
        conj.alpha_min_hat, conj.alpha_max_hat
    )];
    let stdout = match format {
        Format::Json => Envelope::render(
            "legendre",
            &LegendreReport {
                meta: curve.meta,
                curve: conj,
            },
        ),
        Format::Csv => conj.to_csv(digits),
    };
    Ok(Outcome {
        stdout,
        notes,
        code: EXIT_OK,
    })
}

fn classes(
    ifs: &EqualRatioIfs,
    k: usize,
    word: Option<&str>,
    heavy: bool,
    budget: usize,
    format: Format,
) -> CliResult<Outcome> {
    let target = if let Some(w) = word {
        let w = parse_word(w)?;
        if w.len() != k {
            return Err(CliError::Config(format!(
                "word has length {} but k = {k}",
                w.len()
            )));
        }
        Some(ifs.compose_word(&w)?.translation)
    } else if heavy {
        Some(find_heavy_class(ifs, k)?.translation)
    } else {
        None
    };
    let table = salemfrac::ifs::enumerate_classes_with_budget(ifs, k, budget)?;
    let Some(target) = target else {
        let rows: Vec<ClassRow> = table
            .entries()
            .iter()
            .map(|e| ClassRow {
                translation: e.translation.to_string(),
                multiplicity: e.multiplicity.to_string(),
                weight: table.weight(e).to_string(),
            })
            .collect();
        let stdout = match format {
            Format::Json => Envelope::render("classes", &rows),
            Format::Csv => {
                let mut s = String::from("translation,multiplicity,weight\n");
                for r in &rows {
                    s.push_str(&format!(
                        "{},{},{}\n",
                        r.translation, r.multiplicity, r.weight
                    ));
                }
                s
            }
        };
        return Ok(Outcome::ok(stdout));
    };
    let multiplicity = table.get(&target).map_or(0, |e| e.multiplicity);
    let members: Vec<String> = class_members(ifs, k, &target)?
        .iter()
        .map(|w| format_word(w))
        .collect();
    let report = ClassReport {
        level: k,
        translation: target.to_string(),
        multiplicity: multiplicity.to_string(),
        exceeds_lambda_power: heavy_inequality(ifs, multiplicity, k),
        members,
    };
    let stdout = match format {
        Format::Json => Envelope::render("classes", &report),
        Format::Csv => {
            let mut s = String::from("word\n");
            for w in &report.members {
                s.push_str(w);
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome {
        stdout,
        notes: vec![format!(
            "level {k}: multiplicity {}, exceeds lambda^k: {}",
            report.multiplicity, report.exceeds_lambda_power
        )],
        code: EXIT_OK,
    })
}

fn yset(
    n: Option<usize>,
    modulus: Option<&str>,
    m: u32,
    degree_cap: u32,
    budget: usize,
    digits: usize,
    format: Format,
) -> CliResult<Outcome> {
    let (poly, label) = match (n, modulus) {
        (Some(n), None) => (salem_polynomial(n)?, format!("beta_{n}")),
        (None, Some(text)) => {
            let c = text
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Config(format!("--modulus: {e}")))?;
            (
                IntPoly::from_i64(&c),
                format!(
                    "root of [{}]",
                    c.iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
            )
        }
        _ => {
            return Err(CliError::Config(
                "give exactly one of --n or --modulus".into(),
            ))
        }
    };
    let beta = AlgebraicNumber::largest_real_root(&poly)?;
    let ring = Ring::integral(poly, beta)?;
    let report = yset_min_gap(&ring, m, degree_cap, budget)?;
    let out = GapOutput {
        beta: label,
        m,
        degree_cap,
        elements: report.elements,
        gap: Enclosure {
            lo: report.gap.lo().to_string(),
            hi: report.gap.hi().to_string(),
            decimal: report.gap.to_decimal(digits),
        },
    };
    Ok(Outcome::ok(match format {
        Format::Json => Envelope::render("yset", &out),
        Format::Csv => format!(
            "beta,m,degree_cap,elements,gap\n{},{},{},{},\"{}\"\n",
            out.beta, m, degree_cap, out.elements, out.gap.decimal
        ),
    }))
}

#[derive(Serialize)]
struct MoranScheduleOutput<'a> {
    schedule: &'a salemfrac::moran::BlockSchedule,
    dimension: Option<&'a salemfrac::moran::MoranDimension>,
    limits: &'a salemfrac::moran::LimitsReport,
}

fn moran_schedule(
    path: &Path,
    ell_max: usize,
    tail: usize,
    delta: f64,
    digits: usize,
    format: Format,
) -> CliResult<Outcome> {
    let input = parse_schedule(&read(path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let schedule = schedule_from_l(&input.l, ell_max)?;
    schedule.check_invariants()?;
    let dimension = match &input.rates {
        Some(rates) => Some(moran_dimension(&schedule.moran_params(rates)?, ell_max)?),
        None => None,
    };
    let limits = schedule_limits_report(&schedule, tail, delta);
    let mut notes: Vec<String> = dimension.iter().filter_map(|d| d.warning.clone()).collect();
    if let Some(d) = &dimension {
        notes.push(format!("tail infimum estimate: {:.6}", d.liminf_estimate));
    }
    let mut code = EXIT_OK;
    if limits.theta_ratio_ok == Some(false) {
        notes.push(format!(
            "theta ratio left [1 - {delta}, 1 + {delta}] in the tail"
        ));
        code = EXIT_VERIFY;
    }
    let stdout = match format {
        Format::Json => Envelope::render(
            "moran",
            &MoranScheduleOutput {
                schedule: &schedule,
                dimension: dimension.as_ref(),
                limits: &limits,
            },
        ),
        Format::Csv => schedule.to_csv(dimension.as_ref().map(|d| d.s.as_slice()), digits),
    };
    Ok(Outcome {
        stdout,
        notes,
        code,
    })
}

fn moran_periodic(
    branches: &[u64],
    ratios: &[BigRational],
    ell_max: usize,
    digits: usize,
    format: Format,
) -> CliResult<Outcome> {
    if branches.is_empty() || ratios.is_empty() {
        return Err(CliError::Config(
            "moran needs --schedule or both --branches and --ratios".into(),
        ));
    }
    let params = MoranParams::periodic(branches, ratios, ell_max)?;
    let d = moran_dimension(&params, ell_max)?;
    let stdout = match format {
        Format::Json => Envelope::render("moran", &d),
        Format::Csv => {
            let mut s = String::from("ell,s_ell,tail_inf\n");
            for (i, (x, t)) in d.s.iter().zip(&d.tail_infimum).enumerate() {
                s.push_str(&format!("{},{x:.digits$},{t:.digits$}\n", i + 1));
            }
            s
        }
    };
    Ok(Outcome {
        stdout,
        notes: d.warning.iter().cloned().collect(),
        code: EXIT_OK,
    })
}

/// Multiplicity of the class containing `word`.
pub(crate) fn class_multiplicity(ifs: &EqualRatioIfs, word: &[usize]) -> CliResult<u128> {
    let t = ifs.compose_word(word)?.translation;
    let table = enumerate_classes(ifs, word.len())?;
    Ok(table.get(&t).map_or(0, |e| e.multiplicity))
}
