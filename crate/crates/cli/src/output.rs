use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use nu_core::{HyperError, OracleError, PotentialError, ReductionError};

use crate::Format;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;

pub const TOL_ENV: &str = "NU_SPECTRAL_TOL";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Verification(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Verification(m) => f.write_str(m),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Parse { .. } | ReductionError::DegreeBound(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<PotentialError> for CliError {
    fn from(e: PotentialError) -> Self {
        match e {
            PotentialError::UnknownParameter(_)
            | PotentialError::MissingParameter(_)
            | PotentialError::NonPositiveParameter { .. }
            | PotentialError::BadParameter(_)
            | PotentialError::UnknownPotential(_) => CliError::Usage(e.to_string()),
            PotentialError::Reduction(r) => r.into(),
            PotentialError::Oracle(o) => o.into(),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<HyperError> for CliError {
    fn from(e: HyperError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::BadGrid => CliError::Usage(e.to_string()),
            _ => CliError::Verification(e.to_string()),
        }
    }
}

/// 17 significant digits, `.` decimal separator.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_or(io: Option<Format>, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let f = io.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage(format!("format {f:?} is not available for this command").to_lowercase()))
    }
}

pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Flag value, then `NU_SPECTRAL_TOL`, then the default.
pub fn tolerance(flag: Option<f64>, default: f64) -> Result<f64, CliError> {
    let t = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{TOL_ENV}='{s}' is not a number")))?,
            Err(_) => default,
        },
    };
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(CliError::Usage(format!("tolerance must be positive, got {t}")))
    }
}

/// `lo,hi,count`.
pub fn parse_range(s: &str, what: &str) -> Result<(f64, f64, usize), CliError> {
    let bad = || CliError::Usage(format!("{what} must be lo,hi,count; got '{s}'"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if !(lo < hi) || n < 2 {
        return Err(bad());
    }
    Ok((lo, hi, n))
}

pub fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad {what} value '{t}'")))
        })
        .collect()
}
