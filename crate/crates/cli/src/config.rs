use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prime_spin::FieldFamily;

use crate::CliError;

#[derive(Parser)]
#[command(name = "prime-spin", version, about = "Spins of prime ideals in totally real cyclic fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Polynomial, discriminant, unit signs and order flag (JSON)
    FieldInfo,
    /// Fundamental domain constants (JSON)
    DomainInfo,
    /// Domain point counts per residue class
    DomainCount,
    /// Prime ideals up to a norm bound
    Primes,
    /// Quadratic residue symbol of --upper over --lower
    Symbol,
    /// Spins of prime ideals up to a norm bound
    Spins,
    /// Sum of prime spins up to a norm bound
    SpinSum,
    /// Exact check of the Vaughan decomposition for every split of x
    VaughanVerify,
    /// Short character sum scan over characters of degree-one ideals
    CharScan,
    /// Involution spins in a real quadratic field by both pipelines
    QuadSpins,
    /// Selmer rank predictions for quadratic twists
    SelmerScan,
    /// Fast randomized property checks
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Every flag is optional so that config file values can fill the gaps.
#[derive(Args, Default)]
pub struct Flags {
    /// Flat key=value file; keys are flag names without dashes
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Field spec: shanks:M, lehmer:M or quadratic:D
    #[arg(long, global = true)]
    pub field: Option<String>,
    #[arg(long = "max-norm", global = true)]
    pub max_norm: Option<String>,
    #[arg(long = "degree-one-only", global = true)]
    pub degree_one_only: bool,
    /// Power of the generating automorphism
    #[arg(long, global = true)]
    pub k: Option<String>,
    /// Generator class mod 8 as comma separated coordinates
    #[arg(long, global = true)]
    pub mod8: Option<String>,
    /// Generator class mod a rational M, as M:c0,c1,...
    #[arg(long = "modM", global = true)]
    pub mod_m: Option<String>,
    /// Squarefree d = 1 mod 4 for quad-spins
    #[arg(long, global = true)]
    pub d: Option<String>,
    #[arg(long = "max-p", global = true)]
    pub max_p: Option<String>,
    /// 784, or a2,a4,a6,conductor,base_dim
    #[arg(long, global = true)]
    pub curve: Option<String>,
    /// Largest modulus norm for domain-count
    #[arg(long = "mod-norm", global = true)]
    pub mod_norm: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[arg(long, global = true)]
    pub workers: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Upper entry as comma separated coordinates
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub upper: Option<String>,
    /// Lower entry: prime spec p:r (joined by *) or coordinates
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lower: Option<String>,
}

const KEYS: &[&str] = &[
    "field", "max-norm", "degree-one-only", "k", "mod8", "modM", "d", "max-p", "curve", "mod-norm", "seed", "workers", "format",
    "upper", "lower",
];

/// Fully resolved settings. Flags override config file values, which
/// override the defaults.
pub struct RunConfig {
    pub field: FieldFamily,
    pub max_norm: Option<u64>,
    pub degree_one_only: bool,
    pub k: Option<usize>,
    pub mod8: Option<Vec<i128>>,
    pub mod_m: Option<(i128, Vec<i128>)>,
    pub d: i64,
    pub max_p: Option<u64>,
    pub curve: String,
    pub mod_norm: u64,
    pub seed: u64,
    pub workers: usize,
    pub format: Format,
    pub upper: Option<String>,
    pub lower: Option<String>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_config(path: &PathBuf) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| usage(format!("config line {}: expected key=value", i + 1)))?;
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        let k = if k.eq_ignore_ascii_case("modm") { "modM".to_string() } else { k };
        if !KEYS.contains(&k.as_str()) {
            return Err(usage(format!("config line {}: unknown key `{k}`", i + 1)));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

/// Decimal integers of any length; values beyond `u64` saturate so that the
/// budget guards report them.
pub fn parse_u64(key: &str, s: &str) -> Result<u64, CliError> {
    let s = s.trim().replace('_', "");
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(usage(format!("--{key}: `{s}` is not a non-negative integer")));
    }
    Ok(s.parse::<u64>().unwrap_or(u64::MAX))
}

fn parse_i64(key: &str, s: &str) -> Result<i64, CliError> {
    s.trim().parse().map_err(|_| usage(format!("--{key}: `{s}` is not an integer")))
}

pub fn parse_coords(key: &str, s: &str) -> Result<Vec<i128>, CliError> {
    s.split(',')
        .map(|c| c.trim().parse::<i128>().map_err(|_| usage(format!("--{key}: bad coordinate `{c}`"))))
        .collect()
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
        let f = &cli.flags;
        let file = match &f.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let pick = |flag: &Option<String>, key: &str| -> Option<String> { flag.clone().or_else(|| file.get(key).cloned()) };

        let field = pick(&f.field, "field").unwrap_or_else(|| "shanks:1".into());
        let field: FieldFamily = field.parse().map_err(|e: prime_spin::Error| usage(e.to_string()))?;
        let max_norm = pick(&f.max_norm, "max-norm").map(|s| parse_u64("max-norm", &s)).transpose()?;
        let degree_one_only = f.degree_one_only
            || match file.get("degree-one-only").map(|s| s.as_str()) {
                None | Some("false") | Some("0") => false,
                Some("true") | Some("1") => true,
                Some(other) => return Err(usage(format!("degree-one-only: `{other}` is not a boolean"))),
            };
        let k = pick(&f.k, "k").map(|s| parse_u64("k", &s).map(|v| v as usize)).transpose()?;
        let mod8 = pick(&f.mod8, "mod8")
            .map(|s| parse_coords("mod8", &s).map(|c| c.into_iter().map(|x| x.rem_euclid(8)).collect()))
            .transpose()?;
        let mod_m = match pick(&f.mod_m, "modM") {
            None => None,
            Some(s) => {
                let (m, c) = s.split_once(':').ok_or_else(|| usage("--modM: expected M:c0,c1,..."))?;
                let m = parse_i64("modM", m)? as i128;
                if m < 2 {
                    return Err(usage("--modM: modulus must be at least 2"));
                }
                Some((m, parse_coords("modM", c)?.into_iter().map(|x| x.rem_euclid(m)).collect()))
            }
        };
        let d = pick(&f.d, "d").map(|s| parse_i64("d", &s)).transpose()?.unwrap_or(5);
        let max_p = pick(&f.max_p, "max-p").map(|s| parse_u64("max-p", &s)).transpose()?;
        let curve = pick(&f.curve, "curve").unwrap_or_else(|| "784".into());
        let mod_norm = pick(&f.mod_norm, "mod-norm").map(|s| parse_u64("mod-norm", &s)).transpose()?.unwrap_or(10);
        let seed = pick(&f.seed, "seed").map(|s| parse_u64("seed", &s)).transpose()?.unwrap_or(1);
        let workers = match pick(&f.workers, "workers") {
            Some(s) => parse_u64("workers", &s)? as usize,
            None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        };
        if workers == 0 {
            return Err(usage("--workers must be positive"));
        }
        let format = match (f.format, file.get("format")) {
            (Some(x), _) => x,
            (None, Some(s)) => Format::from_str(s, true).map_err(|_| usage(format!("format: `{s}` is not csv or json")))?,
            (None, None) => Format::Csv,
        };
        Ok(RunConfig {
            field,
            max_norm,
            degree_one_only,
            k,
            mod8,
            mod_m,
            d,
            max_p,
            curve,
            mod_norm,
            seed,
            workers,
            format,
            upper: pick(&f.upper, "upper"),
            lower: pick(&f.lower, "lower"),
        })
    }
}
